#include "protograph/gumbel.hpp"

#include <cmath>

#include "protograph/errors.hpp"

namespace protograph {

namespace {
constexpr double kMargin = 1e-6;
}

Eigen::MatrixXd gumbel_diff_draws(long rows, long cols, RngStream& rng) {
  Eigen::MatrixXd d(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      double g1 = rng.gumbel();
      double g0 = rng.gumbel();
      d(i, j) = g1 - g0;
    }
  return d;
}

Eigen::MatrixXd gumbel_sigmoid_from_draws(const Eigen::MatrixXd& p, double temperature,
                                          const Eigen::MatrixXd& gumbel_diff) {
  if (temperature <= 0.0) throw ArgumentError("gumbel_sigmoid: temperature must be > 0");
  // Scalar libm transcendentals: per-element results stay independent of how
  // SIMD packets tile the matrix (Eigen's vectorized exp/log differ in ulps).
  Eigen::MatrixXd out(p.rows(), p.cols());
  for (long i = 0; i < p.rows(); ++i)
    for (long j = 0; j < p.cols(); ++j) {
      double pc = std::min(std::max(p(i, j), kMargin), 1.0 - kMargin);
      double x = (std::log(pc / (1.0 - pc)) + gumbel_diff(i, j)) / temperature;
      out(i, j) = 1.0 / (1.0 + std::exp(-x));
    }
  return out;
}

Eigen::MatrixXd gumbel_sigmoid(const Eigen::MatrixXd& p, double temperature, RngStream& rng,
                               bool hard, Eigen::MatrixXd* soft_out) {
  Eigen::MatrixXd diff = gumbel_diff_draws(p.rows(), p.cols(), rng);
  Eigen::MatrixXd soft = gumbel_sigmoid_from_draws(p, temperature, diff);
  if (soft_out) *soft_out = soft;
  if (!hard) return soft;
  return (soft.array() > 0.5).cast<double>().matrix();
}

}  // namespace protograph
