#pragma once

#include <string>
#include <vector>

#include "protograph/adam.hpp"
#include "protograph/bottleneck.hpp"
#include "protograph/gin.hpp"
#include "protograph/graph.hpp"
#include "protograph/mcts.hpp"
#include "protograph/prototypes.hpp"

namespace protograph {

enum class MiMode { Variational, Contrastive };

MiMode mi_mode_from_string(const std::string& s);
std::string mi_mode_to_string(MiMode m);

struct PgibConfig {
  double alpha1 = 1e-4;
  double alpha2 = 0.1;
  double alpha3 = 5.0;
  MiMode mi_mode = MiMode::Variational;
  double tau = 1.0;
  double xi = 30.0;             // merge percentage
  int per_class = 7;            // J
  int epochs = 300;
  int merge_start = 100;        // T_m
  int merge_period = 50;
  bool merge_enabled = true;
  double lr = 0.005;
  int batch_size = 128;
  std::uint64_t seed = 0;
  double temperature = 1.0;     // gate relaxation
  GinConfig gin;
  MctsConfig mcts;

  void validate() const;
};

struct LossBreakdown {
  double l_cls = 0.0;
  double l_mi1 = 0.0;
  double l_mi2 = 0.0;
  double l_con = 0.0;
  double total = 0.0;
};

// Model parameters plus prototype metadata; everything predict/eval needs.
struct ModelState {
  ParameterSet params;
  PrototypeSet protos;
  PgibConfig cfg;
};

ModelState init_model(int feature_dim, int num_classes, const PgibConfig& cfg);

// One differentiable pass over a batch. `loss` is the weighted total; the
// breakdown carries the unweighted component values.
struct ForwardResult {
  Var h;        // encoder node embeddings
  Var z_sub;    // per-graph compressed embeddings
  Var r;        // similarities vs active prototypes (G x m_active)
  Var logits;   // G x K
  Var pi;       // softmax rows
  Var loss;     // 1 x 1 weighted total
  NodeAssignment assignment;
  NoiseStats stats;
  LossBreakdown breakdown;
};

// stats_override pins the (gradient-detached) noise statistics instead of
// recomputing them from the current embeddings; finite-difference checks pass
// the base-point stats so both loss evaluations see the same constants.
ForwardResult forward_pass(const Batch& batch, const ModelState& state, const TapeBinding& bind,
                           RngStream& rng, GateMode mode,
                           const NoiseStats* stats_override = nullptr);

// -(1/N) sum_i log pi[i, y_i], rows clamped at 1e-12 before the log.
Var classification_loss(Var pi, const std::vector<int>& labels);

double total_of(const LossBreakdown& parts, const PgibConfig& cfg);

struct Prediction {
  int predicted_class = -1;
  Eigen::VectorXd pi;
  Eigen::VectorXd r;         // over active prototypes
  Eigen::VectorXd node_p;    // keep probabilities
  Eigen::RowVectorXd z_sub;
};

// Deterministic single-graph inference (its own one-graph batch, infer-mode
// gates, no draws consumed).
Prediction predict(const Graph& graph, const ModelState& state);

}  // namespace protograph
