#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace protograph {

using EdgeList = std::vector<std::pair<int, int>>;  // same alias as the tape

// Attributed undirected graph. Each undirected edge is stored once with
// u < v; no self-loops. Node indices are 0-based.
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  Eigen::MatrixXd node_features;  // node_count x feature_dim
  int label = 0;
  std::string graph_id;

  void validate() const;  // throws FormatError on violated invariants

  std::vector<int> degrees() const;
  // Node-induced subgraph on `nodes` (kept in the given order); edges kept
  // where both endpoints are selected, reindexed to 0..|nodes|-1.
  Graph induced_subgraph(const std::vector<int>& nodes) const;
  // Connected components as sorted node-index lists, largest first
  // (ties: smaller minimum index first).
  std::vector<std::vector<int>> connected_components() const;
};

struct GraphDataset {
  std::vector<Graph> graphs;
  int num_classes = 0;
  int feature_dim = 0;
  std::string name;

  void validate() const;
};

struct SplitSpec {
  std::vector<int> train, val, test;
  std::uint64_t seed = 0;
};

// Uniform shuffle, then train = floor(0.8 N), val = floor((N - train) / 2),
// test = remainder. Throws if the dataset has fewer than 10 graphs.
SplitSpec split_dataset(const GraphDataset& ds, std::uint64_t seed);

// Several graphs packed as one block-diagonal graph.
struct Batch {
  int num_graphs = 0;
  int num_nodes = 0;
  Eigen::MatrixXd features;                   // num_nodes x feature_dim
  std::shared_ptr<std::vector<int>> membership;  // node -> graph slot
  std::vector<std::pair<int, int>> node_ranges;  // per graph [begin, end)
  std::vector<std::pair<int, int>> edges;        // undirected, offset-shifted
  std::shared_ptr<EdgeList> directed_edges;  // both directions, for the adjacency action
  std::vector<int> labels;
  std::vector<int> graph_indices;  // positions in the source dataset/list
  std::vector<int> node_counts;
};

Batch batch_graphs(const std::vector<Graph>& graphs, const std::vector<int>& indices);
Batch batch_graphs(const std::vector<Graph>& graphs);

}  // namespace protograph
