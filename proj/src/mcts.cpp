#include "protograph/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "protograph/errors.hpp"

namespace protograph {

namespace {

// Largest connected component of the induced subgraph on `nodes` minus
// `removed`, as a sorted node list in host-graph indexing. Ties go to the
// component containing the smallest node index.
std::vector<int> largest_component_after_removal(const Graph& g, const std::vector<int>& nodes,
                                                 int removed) {
  std::vector<char> in_set(g.node_count, 0);
  for (int n : nodes)
    if (n != removed) in_set[n] = 1;
  std::vector<std::vector<int>> adj(g.node_count);
  for (const auto& [u, v] : g.edges) {
    if (in_set[u] && in_set[v]) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  }
  std::vector<char> seen(g.node_count, 0);
  std::vector<int> best;
  for (int start : nodes) {
    if (start == removed || seen[start] || !in_set[start]) continue;
    std::vector<int> comp, stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      comp.push_back(n);
      for (int nb : adj[n])
        if (!seen[nb]) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
    }
    std::sort(comp.begin(), comp.end());
    if (comp.size() > best.size() ||
        (comp.size() == best.size() && !best.empty() && comp.front() < best.front()))
      best = std::move(comp);
  }
  return best;
}

// Degree of each node within the induced subgraph on `nodes`.
std::map<int, int> subset_degrees(const Graph& g, const std::vector<int>& nodes) {
  std::vector<char> in_set(g.node_count, 0);
  for (int n : nodes) in_set[n] = 1;
  std::map<int, int> deg;
  for (int n : nodes) deg[n] = 0;
  for (const auto& [u, v] : g.edges)
    if (in_set[u] && in_set[v]) {
      ++deg[u];
      ++deg[v];
    }
  return deg;
}

double similarity_to_target(const Eigen::RowVectorXd& emb, const Eigen::RowVectorXd& target) {
  double d2 = (emb - target).squaredNorm();
  return std::log((d2 + 1.0) / (d2 + kSimilarityEps));
}

struct TreeNode {
  std::vector<int> nodes;
  std::vector<int> children;     // indices into the node pool
  bool expanded = false;
  bool terminal = false;
  int visits = 0;
  double reward_sum = 0.0;
  double own_reward = 0.0;
};

}  // namespace

MctsResult mcts_search(const Graph& graph, const Eigen::RowVectorXd& target,
                       const SubsetEmbedFn& embed, const MctsConfig& cfg, RngStream& rng) {
  if (graph.node_count == 0) throw ArgumentError("mcts_search: empty graph");
  if (cfg.iterations < 1 || cfg.min_nodes < 1)
    throw ArgumentError("mcts_search: iterations and min_nodes must be >= 1");

  std::vector<TreeNode> pool;
  // De-duplicate states (different removal orders can reach one subgraph).
  std::map<std::vector<int>, int> seen_states;

  MctsResult result;
  result.best_reward = -std::numeric_limits<double>::infinity();

  auto make_node = [&](std::vector<int> nodes) -> int {
    auto it = seen_states.find(nodes);
    if (it != seen_states.end()) return it->second;
    TreeNode tn;
    tn.nodes = nodes;
    tn.terminal = static_cast<int>(nodes.size()) <= cfg.min_nodes;
    tn.own_reward = similarity_to_target(embed(nodes), target);
    if (tn.own_reward > result.best_reward) {
      result.best_reward = tn.own_reward;
      result.best_nodes = nodes;
    }
    pool.push_back(std::move(tn));
    int id = static_cast<int>(pool.size()) - 1;
    seen_states.emplace(pool[id].nodes, id);
    return id;
  };

  std::vector<int> all(graph.node_count);
  std::iota(all.begin(), all.end(), 0);
  int root = make_node(all);

  auto expand = [&](int id) {
    pool[id].expanded = true;
    if (pool[id].terminal) return;
    // Copy: make_node may reallocate the pool mid-loop.
    const std::vector<int> nodes = pool[id].nodes;
    auto deg = subset_degrees(graph, nodes);
    // expansion_width lowest-degree removal candidates, ties by lower index
    std::vector<int> order = nodes;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (deg[a] != deg[b]) return deg[a] < deg[b];
      return a < b;
    });
    if (static_cast<int>(order.size()) > cfg.expansion_width)
      order.resize(cfg.expansion_width);
    std::vector<int> kids;
    for (int rm : order) {
      std::vector<int> child_nodes = largest_component_after_removal(graph, nodes, rm);
      if (child_nodes.empty()) continue;
      int cid = make_node(std::move(child_nodes));
      if (cid == id) continue;
      if (std::find(kids.begin(), kids.end(), cid) == kids.end()) kids.push_back(cid);
    }
    pool[id].children = std::move(kids);
  };

  for (int it = 0; it < cfg.iterations; ++it) {
    // Selection down the tree.
    std::vector<int> path{root};
    int cur = root;
    while (pool[cur].expanded && !pool[cur].terminal && !pool[cur].children.empty()) {
      double best_uct = -std::numeric_limits<double>::infinity();
      int pick = -1;
      for (int cid : pool[cur].children) {
        const TreeNode& c = pool[cid];
        double uct;
        if (c.visits == 0) {
          uct = std::numeric_limits<double>::infinity();
        } else {
          double mean = c.reward_sum / c.visits;
          uct = mean + cfg.exploration_c *
                           std::sqrt(std::log(static_cast<double>(pool[cur].visits + 1)) /
                                     c.visits);
        }
        if (uct > best_uct) {
          best_uct = uct;
          pick = cid;
        }
      }
      if (pick < 0) break;
      cur = pick;
      path.push_back(cur);
    }

    if (!pool[cur].expanded) expand(cur);

    // Rollout from the selected state: random removals, best reward on path.
    double rollout_reward = pool[cur].own_reward;
    std::vector<int> state = pool[cur].nodes;
    for (int step = 0; step < cfg.rollout_limit; ++step) {
      if (static_cast<int>(state.size()) <= cfg.min_nodes) break;
      int rm = state[static_cast<std::size_t>(rng.uniform_below(state.size()))];
      std::vector<int> next = largest_component_after_removal(graph, state, rm);
      if (next.empty()) break;
      double r = similarity_to_target(embed(next), target);
      if (r > result.best_reward) {
        result.best_reward = r;
        result.best_nodes = next;
      }
      rollout_reward = std::max(rollout_reward, r);
      state = std::move(next);
    }

    for (int id : path) {
      ++pool[id].visits;
      pool[id].reward_sum += rollout_reward;
    }
  }

  Eigen::RowVectorXd best_emb = embed(result.best_nodes);
  result.best_distance = (best_emb - target).norm();
  return result;
}

std::vector<ProjectionResult> project_prototypes(
    PrototypeSet& protos, ParameterSet& params, const std::vector<Graph>& train_graphs,
    const GinConfig& gin_cfg, const MctsConfig& cfg, RngStream& rng, int candidate_cap) {
  Eigen::MatrixXd& vectors = params.at("proto.vectors");

  // Node embeddings and full-graph readouts, once per training graph.
  std::vector<Eigen::MatrixXd> node_embs(train_graphs.size());
  Eigen::MatrixXd full_emb(static_cast<long>(train_graphs.size()), vectors.cols());
  for (std::size_t g = 0; g < train_graphs.size(); ++g) {
    Batch b = batch_graphs(train_graphs, {static_cast<int>(g)});
    node_embs[g] = gin_node_embeddings(b, params, gin_cfg);
    std::vector<int> all(train_graphs[g].node_count);
    std::iota(all.begin(), all.end(), 0);
    full_emb.row(static_cast<long>(g)) = readout_rows(node_embs[g], all, gin_cfg.readout_mode);
  }

  std::vector<ProjectionResult> results;
  for (int m : protos.active_indices()) {
    int cls = protos.class_of[m];
    Eigen::RowVectorXd target = vectors.row(m);

    // Nearest same-class graphs by full-graph embedding distance.
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t g = 0; g < train_graphs.size(); ++g)
      if (train_graphs[g].label == cls)
        ranked.emplace_back((full_emb.row(static_cast<long>(g)) - target).norm(),
                            static_cast<int>(g));
    if (ranked.empty())
      throw ArgumentError("project_prototypes: no training graph for class " +
                          std::to_string(cls));
    std::sort(ranked.begin(), ranked.end());
    if (static_cast<int>(ranked.size()) > candidate_cap) ranked.resize(candidate_cap);

    ProjectionResult best;
    best.prototype = m;
    best.distance = std::numeric_limits<double>::infinity();
    for (const auto& [_, gi] : ranked) {
      const Eigen::MatrixXd& ne = node_embs[gi];
      SubsetEmbedFn embed = [&](const std::vector<int>& nodes) {
        return readout_rows(ne, nodes, gin_cfg.readout_mode);
      };
      RngStream search_rng = rng.fork(static_cast<std::uint64_t>(m) * 1000003ULL +
                                      static_cast<std::uint64_t>(gi));
      MctsResult r = mcts_search(train_graphs[gi], target, embed, cfg, search_rng);
      if (r.best_distance < best.distance) {
        best.distance = r.best_distance;
        best.nodes = r.best_nodes;
        best.source_graph = gi;
      }
    }
    vectors.row(m) = readout_rows(node_embs[best.source_graph], best.nodes,
                                  gin_cfg.readout_mode);
    results.push_back(std::move(best));
  }
  return results;
}

}  // namespace protograph
