#pragma once

#include <Eigen/Dense>

#include "protograph/rng.hpp"

namespace protograph {

// Relaxed Bernoulli gate. Soft mode returns
//   sigmoid((logit(p) + g1 - g0) / temperature),   g0, g1 ~ Gumbel(0, 1),
// with p clamped into [1e-6, 1 - 1e-6] before the logit. Hard mode thresholds
// the soft value at 0.5 and returns {0,1}; the soft value is reported through
// soft_out for straight-through gradients.
Eigen::MatrixXd gumbel_sigmoid(const Eigen::MatrixXd& p, double temperature, RngStream& rng,
                               bool hard, Eigen::MatrixXd* soft_out = nullptr);

// The frozen noise behind one gumbel_sigmoid call: per entry, g1 - g0. Allows
// replaying the same relaxation inside a differentiable graph.
Eigen::MatrixXd gumbel_diff_draws(long rows, long cols, RngStream& rng);

// Deterministic soft gate from frozen draws (same formula as above).
Eigen::MatrixXd gumbel_sigmoid_from_draws(const Eigen::MatrixXd& p, double temperature,
                                          const Eigen::MatrixXd& gumbel_diff);

}  // namespace protograph
