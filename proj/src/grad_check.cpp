#include "protograph/grad_check.hpp"

#include <cmath>

#include "protograph/errors.hpp"

namespace protograph {

GradCheckResult finite_difference_check(
    const std::function<double(const ParameterSet&)>& loss_fn, const ParameterSet& params,
    const GradMap& analytic_grads, double h) {
  if (h <= 0.0) throw ArgumentError("finite_difference_check: h must be > 0");
  GradCheckResult res;
  ParameterSet work = params;  // perturbed in place, restored per coordinate
  for (const auto& [name, ga] : analytic_grads) {
    const Eigen::MatrixXd& base = params.at(name);
    if (ga.rows() != base.rows() || ga.cols() != base.cols())
      throw ArgumentError("finite_difference_check: gradient shape mismatch for " + name);
    Eigen::MatrixXd& w = work.at(name);
    for (long r = 0; r < base.rows(); ++r) {
      for (long c = 0; c < base.cols(); ++c) {
        double x0 = base(r, c);
        w(r, c) = x0 + h;
        double fp = loss_fn(work);
        w(r, c) = x0 - h;
        double fm = loss_fn(work);
        w(r, c) = x0;
        if (!std::isfinite(fp) || !std::isfinite(fm))
          throw NumericError("finite_difference_check: non-finite loss at " + name);
        double fd = (fp - fm) / (2.0 * h);
        double an = ga(r, c);
        double denom = std::max({std::abs(fd), std::abs(an), 1e-12});
        double rel = std::abs(fd - an) / denom;
        // Exactly-zero on both sides (parameter unused) contributes 0.
        if (fd == 0.0 && an == 0.0) rel = 0.0;
        if (rel > res.max_rel_error) {
          res.max_rel_error = rel;
          res.worst_param = name;
          res.worst_row = r;
          res.worst_col = c;
          res.analytic = an;
          res.numeric = fd;
        }
      }
    }
  }
  return res;
}

}  // namespace protograph
