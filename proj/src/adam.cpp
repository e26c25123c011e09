#include "protograph/adam.hpp"

#include <cmath>

#include "protograph/errors.hpp"

namespace protograph {

void AdamOptimizer::step(ParameterSet& params, const GradMap& grads) {
  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (const auto& [name, g] : grads) {
    if (!g.allFinite()) throw NumericError("non-finite gradient for parameter: " + name);
    Eigen::MatrixXd& p = params.at(name);
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw ArgumentError("gradient shape mismatch for parameter: " + name);
    auto [mit, inserted_m] = m_.try_emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    auto [vit, inserted_v] = v_.try_emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    Eigen::MatrixXd& m = mit->second;
    Eigen::MatrixXd& v = vit->second;
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    Eigen::ArrayXXd mhat = m.array() / bc1;
    Eigen::ArrayXXd vhat = v.array() / bc2;
    p.array() -= cfg_.lr * mhat / (vhat.sqrt() + cfg_.eps);
  }
}

void AdamOptimizer::reset_rows(const std::string& name, const std::vector<int>& rows) {
  auto mit = m_.find(name);
  if (mit != m_.end())
    for (int r : rows) mit->second.row(r).setZero();
  auto vit = v_.find(name);
  if (vit != v_.end())
    for (int r : rows) vit->second.row(r).setZero();
}

}  // namespace protograph
