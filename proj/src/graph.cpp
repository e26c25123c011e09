#include "protograph/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "protograph/errors.hpp"
#include "protograph/rng.hpp"

namespace protograph {

void Graph::validate() const {
  if (node_count <= 0) throw FormatError("graph " + graph_id + ": empty node set");
  if (node_features.rows() != node_count)
    throw FormatError("graph " + graph_id + ": feature row count != node count");
  if (!node_features.allFinite())
    throw FormatError("graph " + graph_id + ": non-finite node features");
  std::set<std::pair<int, int>> seen;
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw FormatError("graph " + graph_id + ": edge endpoint out of range");
    if (u == v) throw FormatError("graph " + graph_id + ": self-loop survived ingestion");
    if (u > v) throw FormatError("graph " + graph_id + ": edge not stored with u < v");
    if (!seen.insert({u, v}).second)
      throw FormatError("graph " + graph_id + ": duplicate edge");
  }
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(node_count, 0);
  for (const auto& [u, v] : edges) {
    ++d[u];
    ++d[v];
  }
  return d;
}

Graph Graph::induced_subgraph(const std::vector<int>& nodes) const {
  Graph out;
  out.node_count = static_cast<int>(nodes.size());
  out.label = label;
  out.graph_id = graph_id + "/induced";
  out.node_features.resize(out.node_count, node_features.cols());
  std::vector<int> remap(node_count, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int n = nodes[i];
    if (n < 0 || n >= node_count) throw ArgumentError("induced_subgraph: node out of range");
    if (remap[n] != -1) throw ArgumentError("induced_subgraph: duplicate node");
    remap[n] = static_cast<int>(i);
    out.node_features.row(static_cast<long>(i)) = node_features.row(n);
  }
  for (const auto& [u, v] : edges) {
    if (remap[u] != -1 && remap[v] != -1) {
      int a = remap[u], b = remap[v];
      out.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  return out;
}

std::vector<std::vector<int>> Graph::connected_components() const {
  std::vector<std::vector<int>> adj(node_count);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> comp(node_count, -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < node_count; ++start) {
    if (comp[start] != -1) continue;
    std::vector<int> stack{start}, members;
    comp[start] = static_cast<int>(out.size());
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      members.push_back(n);
      for (int nb : adj[n])
        if (comp[nb] == -1) {
          comp[nb] = comp[start];
          stack.push_back(nb);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return out;
}

void GraphDataset::validate() const {
  if (num_classes < 1) throw FormatError("dataset " + name + ": no classes");
  for (const Graph& g : graphs) {
    g.validate();
    if (g.node_features.cols() != feature_dim)
      throw FormatError("dataset " + name + ": feature_dim mismatch in graph " + g.graph_id);
    if (g.label < 0 || g.label >= num_classes)
      throw FormatError("dataset " + name + ": label out of range in graph " + g.graph_id);
  }
}

SplitSpec split_dataset(const GraphDataset& ds, std::uint64_t seed) {
  int n = static_cast<int>(ds.graphs.size());
  if (n < 10) throw ArgumentError("split_dataset: need at least 10 graphs, have " +
                                  std::to_string(n));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  RngStream rng(seed);
  rng.shuffle(idx);
  int n_train = (8 * n) / 10;  // floor(0.8 N) in exact integer arithmetic
  int n_val = (n - n_train) / 2;
  SplitSpec s;
  s.seed = seed;
  s.train.assign(idx.begin(), idx.begin() + n_train);
  s.val.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  s.test.assign(idx.begin() + n_train + n_val, idx.end());
  return s;
}

Batch batch_graphs(const std::vector<Graph>& graphs, const std::vector<int>& indices) {
  if (indices.empty()) throw ArgumentError("batch_graphs: empty batch");
  Batch b;
  b.num_graphs = static_cast<int>(indices.size());
  long feat_dim = graphs.at(indices[0]).node_features.cols();
  int total = 0;
  for (int gi : indices) {
    const Graph& g = graphs.at(gi);
    if (g.node_features.cols() != feat_dim)
      throw ArgumentError("batch_graphs: mixed feature dimensions");
    total += g.node_count;
  }
  b.num_nodes = total;
  b.features.resize(total, feat_dim);
  b.membership = std::make_shared<std::vector<int>>();
  b.membership->reserve(total);
  b.directed_edges = std::make_shared<EdgeList>();
  int offset = 0;
  int slot = 0;
  for (int gi : indices) {
    const Graph& g = graphs.at(gi);
    b.features.block(offset, 0, g.node_count, feat_dim) = g.node_features;
    b.node_ranges.emplace_back(offset, offset + g.node_count);
    for (int i = 0; i < g.node_count; ++i) b.membership->push_back(slot);
    for (const auto& [u, v] : g.edges) {
      b.edges.emplace_back(u + offset, v + offset);
      b.directed_edges->emplace_back(u + offset, v + offset);
      b.directed_edges->emplace_back(v + offset, u + offset);
    }
    b.labels.push_back(g.label);
    b.graph_indices.push_back(gi);
    b.node_counts.push_back(g.node_count);
    offset += g.node_count;
    ++slot;
  }
  return b;
}

Batch batch_graphs(const std::vector<Graph>& graphs) {
  std::vector<int> idx(graphs.size());
  std::iota(idx.begin(), idx.end(), 0);
  return batch_graphs(graphs, idx);
}

}  // namespace protograph
