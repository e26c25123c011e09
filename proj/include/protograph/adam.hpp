#pragma once

#include <map>
#include <string>
#include <vector>

#include "protograph/params.hpp"

namespace protograph {

struct AdamConfig {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction, keyed by parameter name. Parameters without an
// entry in the gradient map are left untouched (their moments also stay put,
// so a fused step over all groups equals separate steps on disjoint groups).
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(ParameterSet& params, const GradMap& grads);

  // Clears first/second moments for the given rows of one parameter. Used
  // when prototype rows are deactivated: otherwise stale momentum would keep
  // moving rows that no longer receive gradients.
  void reset_rows(const std::string& name, const std::vector<int>& rows);

  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::map<std::string, Eigen::MatrixXd> m_;
  std::map<std::string, Eigen::MatrixXd> v_;
};

}  // namespace protograph
