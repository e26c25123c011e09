#include "protograph/ba2motifs.hpp"

#include <algorithm>

#include "protograph/errors.hpp"
#include "protograph/rng.hpp"

namespace protograph {

namespace {

constexpr int kBaseNodes = 20;
constexpr int kMotifNodes = 5;
constexpr int kFeatureDim = 10;

// Barabási–Albert with m = 1: node 1 attaches to node 0, each later node
// attaches to one existing node chosen proportionally to degree (realized by
// sampling a uniform endpoint of the edge list built so far).
std::vector<std::pair<int, int>> ba_edges(RngStream& rng) {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> endpoints;
  edges.emplace_back(0, 1);
  endpoints.push_back(0);
  endpoints.push_back(1);
  for (int n = 2; n < kBaseNodes; ++n) {
    int target = endpoints[static_cast<std::size_t>(rng.uniform_below(endpoints.size()))];
    edges.emplace_back(std::min(n, target), std::max(n, target));
    endpoints.push_back(n);
    endpoints.push_back(target);
  }
  return edges;
}

}  // namespace

std::vector<int> ba2motifs_motif_nodes() {
  std::vector<int> out(kMotifNodes);
  for (int i = 0; i < kMotifNodes; ++i) out[i] = kBaseNodes + i;
  return out;
}

GraphDataset generate_ba2motifs(int count, std::uint64_t seed) {
  if (count <= 0 || count % 2 != 0)
    throw ArgumentError("generate_ba2motifs: count must be positive and even");
  GraphDataset ds;
  ds.name = "ba2motifs";
  ds.num_classes = 2;
  ds.feature_dim = kFeatureDim;
  ds.graphs.reserve(count);
  RngStream root(seed);
  for (int g = 0; g < count; ++g) {
    RngStream rng = root.fork(static_cast<std::uint64_t>(g));
    Graph gr;
    gr.node_count = kBaseNodes + kMotifNodes;
    gr.label = g % 2;  // 0 = house, 1 = cycle; alternation keeps classes balanced
    gr.graph_id = "ba2motifs#" + std::to_string(g);
    gr.edges = ba_edges(rng);
    int b = kBaseNodes;
    // 5-cycle over motif nodes b..b+4
    for (int i = 0; i < kMotifNodes; ++i) {
      int u = b + i, v = b + (i + 1) % kMotifNodes;
      gr.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    if (gr.label == 0) gr.edges.emplace_back(b, b + 2);  // roof chord -> house
    int base_node = static_cast<int>(rng.uniform_below(kBaseNodes));
    int motif_node = b + static_cast<int>(rng.uniform_below(kMotifNodes));
    gr.edges.emplace_back(base_node, motif_node);  // single attachment edge
    gr.node_features = Eigen::MatrixXd::Constant(gr.node_count, kFeatureDim, 0.1);
    ds.graphs.push_back(std::move(gr));
  }
  ds.validate();
  return ds;
}

}  // namespace protograph
