#pragma once

#include <vector>

#include "protograph/binding.hpp"
#include "protograph/gin.hpp"
#include "protograph/graph.hpp"
#include "protograph/rng.hpp"

namespace protograph {

// Batch noise statistics: per-dimension mean and standard deviation of the
// node embeddings, detached from the gradient flow. sigma is floored at 1e-6.
struct NoiseStats {
  Eigen::RowVectorXd mu;
  Eigen::RowVectorXd sigma;
};

NoiseStats batch_noise_stats(const Eigen::MatrixXd& h_values);

// Per-node keep probability p, relaxed gate lambda, and the two-column
// subgraph assignment S = [p, 1-p].
struct NodeAssignment {
  Var p;       // batch_nodes x 1
  Var lambda;  // batch_nodes x 1
  Var S;       // batch_nodes x 2
};

enum class GateMode { Train, Infer };

struct CompressResult {
  Var z;  // compressed node matrix, batch_nodes x hidden
  NodeAssignment assignment;
  NoiseStats stats;
};

// Registers gate.{w1,b1,w2,b2} (hidden -> hidden -> 1, sigmoid head).
void init_gate_params(ParameterSet& params, int hidden_dim, RngStream& rng);

// z_i = lambda_i * h_i + (1 - lambda_i) * eps_i. Train mode draws lambda via
// the Gumbel-sigmoid relaxation and eps from N(mu_h, diag sigma_h^2); infer
// mode uses lambda = p and eps = mu_h (the expectation). stats_override pins
// mu/sigma instead of recomputing them from h; finite-difference gradient
// checks need this because the stats are detached from the gradient.
CompressResult compress_nodes(Var h, const TapeBinding& bind, RngStream& rng, GateMode mode,
                              double temperature = 1.0,
                              const NoiseStats* stats_override = nullptr);

// Compression upper-bound loss, evaluated per graph then averaged:
//   A = sum_i (1 - lambda_i)^2
//   B_d = sum_i lambda_i (h_{i,d} - mu_d) / sigma_d
//   loss = -0.5 log(max(A, 1e-6)) + A / (2 n) + (sum_d B_d^2) / (2 n D)
Var mi_upper_bound_loss(const NodeAssignment& assignment, Var h, const NoiseStats& stats,
                        const Batch& batch);

// || RowNorm(S^T A S) - I_2 ||_F over the block-diagonal batch adjacency;
// all-zero rows of S^T A S stay zero under RowNorm.
Var connectivity_loss(const NodeAssignment& assignment, const Batch& batch);

// Indices of the ceil(k * n) nodes with the largest keep probability,
// ties broken toward the lower node index. Returned sorted ascending.
std::vector<int> select_topk_nodes(const Eigen::VectorXd& p, double k);

}  // namespace protograph
