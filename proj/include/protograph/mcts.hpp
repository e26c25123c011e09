#pragma once

#include <functional>
#include <vector>

#include "protograph/gin.hpp"
#include "protograph/graph.hpp"
#include "protograph/prototypes.hpp"
#include "protograph/rng.hpp"

namespace protograph {

struct MctsConfig {
  int iterations = 20;
  int min_nodes = 5;
  int expansion_width = 12;
  double exploration_c = 10.0;
  int rollout_limit = 1;
};

// Maps a connected node subset of the host graph to its embedding.
using SubsetEmbedFn = std::function<Eigen::RowVectorXd(const std::vector<int>&)>;

struct MctsResult {
  std::vector<int> best_nodes;  // sorted ascending
  double best_distance = 0.0;   // Euclidean distance of best embedding to target
  double best_reward = 0.0;     // Eq.-7-style similarity of the best state
};

// Tree search over connected subgraphs of `graph`. The root is the full node
// set; a child removes one of the expansion_width lowest-degree nodes (ties
// toward the lower index) and keeps the largest connected component.
// Selection maximizes mean reward + c * sqrt(ln N_parent / N_child); reward
// is the similarity between the state's embedding and `target`. States with
// |nodes| <= min_nodes are terminal. Deterministic given (rng, cfg, inputs).
MctsResult mcts_search(const Graph& graph, const Eigen::RowVectorXd& target,
                       const SubsetEmbedFn& embed, const MctsConfig& cfg, RngStream& rng);

struct ProjectionResult {
  int prototype = -1;
  int source_graph = -1;         // index into the training list passed in
  std::vector<int> nodes;        // node set within that graph
  double distance = 0.0;
};

// Replaces every active prototype vector by the embedding of the closest
// subgraph found by MCTS over (at most `candidate_cap`) nearest same-class
// training graphs. Node embeddings are computed once per graph without noise
// injection; candidate embeddings are readouts over node subsets.
std::vector<ProjectionResult> project_prototypes(
    PrototypeSet& protos, ParameterSet& params, const std::vector<Graph>& train_graphs,
    const GinConfig& gin_cfg, const MctsConfig& cfg, RngStream& rng, int candidate_cap = 10);

}  // namespace protograph
