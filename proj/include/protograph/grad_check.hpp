#pragma once

#include <functional>
#include <string>

#include "protograph/params.hpp"

namespace protograph {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  long worst_row = -1;
  long worst_col = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central finite differences (f(x+h) - f(x-h)) / 2h against analytic
// gradients, coordinate by coordinate. Relative error uses a 1e-12
// denominator floor. loss_fn must be deterministic (freeze any draws).
GradCheckResult finite_difference_check(
    const std::function<double(const ParameterSet&)>& loss_fn, const ParameterSet& params,
    const GradMap& analytic_grads, double h);

}  // namespace protograph
