#include "protograph/tape.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "protograph/errors.hpp"

namespace protograph {

namespace {

void check_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                        "x" + std::to_string(b.cols()) + ")");
  }
}

void check_same_tape(Var a, Var b, const char* op) {
  if (a.tape != b.tape) throw ArgumentError(std::string(op) + ": operands on different tapes");
}

}  // namespace

const Mat& Var::value() const { return tape->value(*this); }

int Tape::push(Mat value, bool requires_grad, std::function<void(Tape&)> pull) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.pull = std::move(pull);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::param(Mat value) { return Var{this, push(std::move(value), true, nullptr)}; }

Var Tape::constant(Mat value) { return Var{this, push(std::move(value), false, nullptr)}; }

const Mat& Tape::value(Var v) const { return nodes_.at(v.id).value; }

Mat Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.grad.size() == 0) return Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(int id, const Mat& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw ArgumentError("backward: loss from another tape");
  const Mat& lv = nodes_.at(loss.id).value;
  if (lv.rows() != 1 || lv.cols() != 1) throw ArgumentError("backward: loss must be 1x1");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[loss.id].grad = Mat::Ones(1, 1);
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.grad.size() != 0 && n.pull) n.pull(*this);
  }
}

// The operation bodies live on TapeOps (a friend of Tape) so that their
// pull-back lambdas can reach the node storage directly.
class TapeOps {
 public:
  static bool rg(const Tape& t, int id) { return t.nodes_[id].requires_grad; }
  static const Mat& val(const Tape& t, int id) { return t.nodes_[id].value; }
  static const Mat& grd(const Tape& t, int id) { return t.nodes_[id].grad; }
  static Var make(Tape& t, Mat v, bool requires_grad, std::function<void(Tape&)> pull) {
    int id = t.push(std::move(v), requires_grad, nullptr);
    if (requires_grad && pull) t.nodes_[id].pull = std::move(pull);
    return Var{&t, id};
  }
  static void acc(Tape& t, int id, const Mat& g) { t.accumulate(id, g); }

  // -- elementwise ------------------------------------------------------

  static Var add(Var a, Var b) {
    check_same_tape(a, b, "add");
    Tape& t = *a.tape;
    check_same_shape(a.value(), b.value(), "add");
    Mat v = a.value() + b.value();
    int ia = a.id, ib = b.id;
    bool needs = rg(t, ia) || rg(t, ib);
    Var out = make(t, std::move(v), needs, nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, ib](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ia, g);
      acc(tp, ib, g);
    };
    return out;
  }

  static Var sub(Var a, Var b) {
    check_same_tape(a, b, "sub");
    Tape& t = *a.tape;
    check_same_shape(a.value(), b.value(), "sub");
    Mat v = a.value() - b.value();
    int ia = a.id, ib = b.id;
    Var out = make(t, std::move(v), rg(t, ia) || rg(t, ib), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, ib](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ia, g);
      acc(tp, ib, -g);
    };
    return out;
  }

  static Var mul(Var a, Var b) {
    check_same_tape(a, b, "mul");
    Tape& t = *a.tape;
    check_same_shape(a.value(), b.value(), "mul");
    Mat v = a.value().cwiseProduct(b.value());
    int ia = a.id, ib = b.id;
    Var out = make(t, std::move(v), rg(t, ia) || rg(t, ib), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, ib](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ia, g.cwiseProduct(val(tp, ib)));
      acc(tp, ib, g.cwiseProduct(val(tp, ia)));
    };
    return out;
  }

  static Var scale(Var a, double s) {
    Tape& t = *a.tape;
    Mat v = a.value() * s;
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, s](Tape& tp) { acc(tp, ia, grd(tp, id) * s); };
    return out;
  }

  static Var add_scalar(Var a, double c) {
    Tape& t = *a.tape;
    Mat v = a.value().array() + c;
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) { acc(tp, ia, grd(tp, id)); };
    return out;
  }

  static Var relu(Var a) {
    Tape& t = *a.tape;
    Mat v = a.value().cwiseMax(0.0);
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& x = val(tp, ia);
      acc(tp, ia, (x.array() > 0.0).select(g, Mat::Zero(g.rows(), g.cols())));
    };
    return out;
  }

  static Var sigmoid(Var a) {
    Tape& t = *a.tape;
    // Scalar std::exp keeps results independent of SIMD packet boundaries
    // (Eigen's vectorized exp/log differ from libm in the last ulp, so the
    // same element could change with matrix shape otherwise).
    Mat v = a.value().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& y = val(tp, id);
      acc(tp, ia, (g.array() * y.array() * (1.0 - y.array())).matrix());
    };
    return out;
  }

  static Var log_elem(Var a) {
    Tape& t = *a.tape;
    if ((a.value().array() <= 0.0).any()) throw NumericError("log_elem: non-positive input");
    Mat v = a.value().unaryExpr([](double x) { return std::log(x); });  // scalar, see sigmoid
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) {
      acc(tp, ia, (grd(tp, id).array() / val(tp, ia).array()).matrix());
    };
    return out;
  }

  static Var sqrt_elem(Var a) {
    Tape& t = *a.tape;
    if ((a.value().array() < 0.0).any()) throw NumericError("sqrt_elem: negative input");
    Mat v = a.value().array().sqrt().matrix();
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) {
      const Mat& y = val(tp, id);
      Mat denom = (2.0 * y.array()).cwiseMax(1e-300).matrix();
      acc(tp, ia, (grd(tp, id).array() / denom.array()).matrix());
    };
    return out;
  }

  static Var clamp_min(Var a, double lo) {
    Tape& t = *a.tape;
    Mat v = a.value().cwiseMax(lo);
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, lo](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& x = val(tp, ia);
      acc(tp, ia, (x.array() > lo).select(g, Mat::Zero(g.rows(), g.cols())));
    };
    return out;
  }

  // -- broadcasts -------------------------------------------------------

  static Var add_rowvec(Var x, Var bias) {
    check_same_tape(x, bias, "add_rowvec");
    Tape& t = *x.tape;
    if (bias.rows() != 1 || bias.cols() != x.cols())
      throw ArgumentError("add_rowvec: bias must be 1 x cols(x)");
    Mat v = x.value().rowwise() + Eigen::RowVectorXd(bias.value().row(0));
    int ix = x.id, ib = bias.id;
    Var out = make(t, std::move(v), rg(t, ix) || rg(t, ib), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, ib](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ix, g);
      acc(tp, ib, g.colwise().sum());
    };
    return out;
  }

  static Var sub_rowvec_const(Var x, const Eigen::RowVectorXd& r) {
    Tape& t = *x.tape;
    if (r.cols() != x.cols()) throw ArgumentError("sub_rowvec_const: width mismatch");
    Mat v = x.value().rowwise() - r;
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix](Tape& tp) { acc(tp, ix, grd(tp, id)); };
    return out;
  }

  static Var mul_rowvec_const(Var x, const Eigen::RowVectorXd& r) {
    Tape& t = *x.tape;
    if (r.cols() != x.cols()) throw ArgumentError("mul_rowvec_const: width mismatch");
    Mat v = x.value().array().rowwise() * r.array();
    int ix = x.id;
    auto rc = std::make_shared<Eigen::RowVectorXd>(r);
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, rc](Tape& tp) {
      acc(tp, ix, (grd(tp, id).array().rowwise() * rc->array()).matrix());
    };
    return out;
  }

  static Var colscale(Var x, Var col) {
    check_same_tape(x, col, "colscale");
    Tape& t = *x.tape;
    if (col.cols() != 1 || col.rows() != x.rows())
      throw ArgumentError("colscale: col must be rows(x) x 1");
    Mat v = x.value().array().colwise() * col.value().col(0).array();
    int ix = x.id, ic = col.id;
    Var out = make(t, std::move(v), rg(t, ix) || rg(t, ic), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, ic](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ix, (g.array().colwise() * val(tp, ic).col(0).array()).matrix());
      acc(tp, ic, g.cwiseProduct(val(tp, ix)).rowwise().sum());
    };
    return out;
  }

  static Var colscale_const(Var x, const Eigen::VectorXd& col) {
    Tape& t = *x.tape;
    if (col.rows() != x.rows()) throw ArgumentError("colscale_const: height mismatch");
    Mat v = x.value().array().colwise() * col.array();
    int ix = x.id;
    auto cc = std::make_shared<Eigen::VectorXd>(col);
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, cc](Tape& tp) {
      acc(tp, ix, (grd(tp, id).array().colwise() * cc->array()).matrix());
    };
    return out;
  }

  // -- matrix products ----------------------------------------------------

  static Var matmul(Var a, Var b) {
    check_same_tape(a, b, "matmul");
    Tape& t = *a.tape;
    if (a.cols() != b.rows()) throw ArgumentError("matmul: inner dimension mismatch");
    Mat v = a.value() * b.value();
    int ia = a.id, ib = b.id;
    Var out = make(t, std::move(v), rg(t, ia) || rg(t, ib), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, ib](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ia, g * val(tp, ib).transpose());
      acc(tp, ib, val(tp, ia).transpose() * g);
    };
    return out;
  }

  static Var matmul_tn(Var a, Var b) {
    check_same_tape(a, b, "matmul_tn");
    Tape& t = *a.tape;
    if (a.rows() != b.rows()) throw ArgumentError("matmul_tn: row mismatch");
    Mat v = a.value().transpose() * b.value();
    int ia = a.id, ib = b.id;
    Var out = make(t, std::move(v), rg(t, ia) || rg(t, ib), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia, ib](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ia, val(tp, ib) * g.transpose());
      acc(tp, ib, val(tp, ia) * g);
    };
    return out;
  }

  // -- reductions -----------------------------------------------------------

  static Var sum_all(Var a) {
    Tape& t = *a.tape;
    Mat v(1, 1);
    v(0, 0) = a.value().sum();
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) {
      const Mat& x = val(tp, ia);
      acc(tp, ia, Mat::Constant(x.rows(), x.cols(), grd(tp, id)(0, 0)));
    };
    return out;
  }

  static Var row_sum(Var a) {
    Tape& t = *a.tape;
    Mat v = a.value().rowwise().sum();
    int ia = a.id;
    Var out = make(t, std::move(v), rg(t, ia), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ia](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ia, g * Eigen::RowVectorXd::Ones(val(tp, ia).cols()));
    };
    return out;
  }

  // -- graph-structured -------------------------------------------------

  static Var neighbor_sum(Var x, std::shared_ptr<const EdgeList> edges) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    Mat v = Mat::Zero(xv.rows(), xv.cols());
    for (const auto& [u, w] : *edges) v.row(w) += xv.row(u);
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, edges](Tape& tp) {
      const Mat& g = grd(tp, id);
      Mat gx = Mat::Zero(g.rows(), g.cols());
      for (const auto& [u, w] : *edges) gx.row(u) += g.row(w);
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var segment_sum(Var x, std::shared_ptr<const std::vector<int>> membership,
                         int num_segments) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    if (static_cast<int>(membership->size()) != xv.rows())
      throw ArgumentError("segment_sum: membership length mismatch");
    Mat v = Mat::Zero(num_segments, xv.cols());
    for (int i = 0; i < xv.rows(); ++i) v.row((*membership)[i]) += xv.row(i);
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, membership](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& xval = val(tp, ix);
      Mat gx(xval.rows(), xval.cols());
      for (int i = 0; i < xval.rows(); ++i) gx.row(i) = g.row((*membership)[i]);
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var segment_mean(Var x, std::shared_ptr<const std::vector<int>> membership,
                          int num_segments) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    if (static_cast<int>(membership->size()) != xv.rows())
      throw ArgumentError("segment_mean: membership length mismatch");
    auto counts = std::make_shared<std::vector<double>>(num_segments, 0.0);
    for (int m : *membership) (*counts)[m] += 1.0;
    for (int s = 0; s < num_segments; ++s)
      if ((*counts)[s] == 0.0)
        throw ArgumentError("segment_mean: empty segment " + std::to_string(s));
    Mat v = Mat::Zero(num_segments, xv.cols());
    for (int i = 0; i < xv.rows(); ++i) v.row((*membership)[i]) += xv.row(i);
    for (int s = 0; s < num_segments; ++s) v.row(s) /= (*counts)[s];
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, membership, counts](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& xval = val(tp, ix);
      Mat gx(xval.rows(), xval.cols());
      for (int i = 0; i < xval.rows(); ++i) {
        int s = (*membership)[i];
        gx.row(i) = g.row(s) / (*counts)[s];
      }
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var segment_max(Var x, std::shared_ptr<const std::vector<int>> membership,
                         int num_segments) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    if (static_cast<int>(membership->size()) != xv.rows())
      throw ArgumentError("segment_max: membership length mismatch");
    Mat v = Mat::Constant(num_segments, xv.cols(), -std::numeric_limits<double>::infinity());
    // argmax[s * cols + d]: first row achieving the segment maximum.
    auto argmax = std::make_shared<std::vector<int>>(num_segments * xv.cols(), -1);
    for (int i = 0; i < xv.rows(); ++i) {
      int s = (*membership)[i];
      for (int d = 0; d < xv.cols(); ++d) {
        if (xv(i, d) > v(s, d)) {
          v(s, d) = xv(i, d);
          (*argmax)[s * xv.cols() + d] = i;
        }
      }
    }
    for (int s = 0; s < num_segments; ++s)
      for (int d = 0; d < xv.cols(); ++d)
        if ((*argmax)[s * xv.cols() + d] < 0)
          throw ArgumentError("segment_max: empty segment " + std::to_string(s));
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, argmax](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& xval = val(tp, ix);
      Mat gx = Mat::Zero(xval.rows(), xval.cols());
      for (int s = 0; s < g.rows(); ++s)
        for (int d = 0; d < g.cols(); ++d) gx((*argmax)[s * g.cols() + d], d) += g(s, d);
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var assignment_cols(Var p) {
    Tape& t = *p.tape;
    if (p.cols() != 1) throw ArgumentError("assignment_cols: expected column vector");
    Mat v(p.rows(), 2);
    v.col(0) = p.value().col(0);
    v.col(1) = 1.0 - p.value().col(0).array();
    int ip = p.id;
    Var out = make(t, std::move(v), rg(t, ip), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ip](Tape& tp) {
      const Mat& g = grd(tp, id);
      acc(tp, ip, g.col(0) - g.col(1));
    };
    return out;
  }

  // -- prototype interactions ---------------------------------------------

  static Var pairwise_sqdist(Var z, Var p) {
    check_same_tape(z, p, "pairwise_sqdist");
    Tape& t = *z.tape;
    if (z.cols() != p.cols()) throw ArgumentError("pairwise_sqdist: dimension mismatch");
    const Mat& zv = z.value();
    const Mat& pv = p.value();
    // Per-pair form: entry (i,j) depends only on rows i and j, so values are
    // bit-stable under adding/removing unrelated rows (GEMM expansion is not).
    Mat v(zv.rows(), pv.rows());
    for (long i = 0; i < zv.rows(); ++i)
      for (long j = 0; j < pv.rows(); ++j) v(i, j) = (zv.row(i) - pv.row(j)).squaredNorm();
    int iz = z.id, ip = p.id;
    Var out = make(t, std::move(v), rg(t, iz) || rg(t, ip), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, iz, ip](Tape& tp) {
      const Mat& g = grd(tp, id);  // G x M
      const Mat& zval = val(tp, iz);
      const Mat& pval = val(tp, ip);
      Eigen::VectorXd grow = g.rowwise().sum();
      Eigen::VectorXd gcol = g.colwise().sum();
      acc(tp, iz, 2.0 * ((zval.array().colwise() * grow.array()).matrix() - g * pval));
      acc(tp, ip,
          2.0 * ((pval.array().colwise() * gcol.array()).matrix() - g.transpose() * zval));
    };
    return out;
  }

  static Var gather_rows(Var x, std::vector<int> idx) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    auto ids = std::make_shared<std::vector<int>>(std::move(idx));
    Mat v(static_cast<int>(ids->size()), xv.cols());
    for (std::size_t i = 0; i < ids->size(); ++i) {
      int r = (*ids)[i];
      if (r < 0 || r >= xv.rows()) throw ArgumentError("gather_rows: index out of range");
      v.row(static_cast<int>(i)) = xv.row(r);
    }
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, ids](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& xval = val(tp, ix);
      Mat gx = Mat::Zero(xval.rows(), xval.cols());
      for (std::size_t i = 0; i < ids->size(); ++i)
        gx.row((*ids)[i]) += g.row(static_cast<int>(i));
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var masked_logsumexp(Var x, const Eigen::MatrixXd& mask) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    check_same_shape(xv, mask, "masked_logsumexp");
    Mat v(xv.rows(), 1);
    auto m = std::make_shared<Mat>(mask);
    for (int i = 0; i < xv.rows(); ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < xv.cols(); ++j)
        if (mask(i, j) != 0.0 && xv(i, j) > mx) mx = xv(i, j);
      if (!std::isfinite(mx))
        throw ArgumentError("masked_logsumexp: row " + std::to_string(i) + " selects no entries");
      double s = 0.0;
      for (int j = 0; j < xv.cols(); ++j)
        if (mask(i, j) != 0.0) s += std::exp(xv(i, j) - mx);
      v(i, 0) = mx + std::log(s);
    }
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, m](Tape& tp) {
      const Mat& g = grd(tp, id);  // N x 1
      const Mat& xval = val(tp, ix);
      const Mat& lse = val(tp, id);
      Mat gx = Mat::Zero(xval.rows(), xval.cols());
      for (int i = 0; i < xval.rows(); ++i)
        for (int j = 0; j < xval.cols(); ++j)
          if ((*m)(i, j) != 0.0) gx(i, j) = g(i, 0) * std::exp(xval(i, j) - lse(i, 0));
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var row_normalize(Var x) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    Mat v(xv.rows(), xv.cols());
    auto sums = std::make_shared<Eigen::VectorXd>(xv.rowwise().sum());
    for (int i = 0; i < xv.rows(); ++i) {
      if ((*sums)(i) == 0.0) {
        v.row(i).setZero();  // all-zero rows stay zero
      } else {
        v.row(i) = xv.row(i) / (*sums)(i);
      }
    }
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, sums](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& y = val(tp, id);
      Mat gx = Mat::Zero(g.rows(), g.cols());
      for (int i = 0; i < g.rows(); ++i) {
        double s = (*sums)(i);
        if (s == 0.0) continue;
        double dot = g.row(i).dot(y.row(i));
        gx.row(i) = (g.row(i).array() - dot) / s;
      }
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var softmax_rows(Var x) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    Mat v(xv.rows(), xv.cols());
    for (int i = 0; i < xv.rows(); ++i) {
      double mx = xv.row(i).maxCoeff();
      Eigen::RowVectorXd e =
          xv.row(i).unaryExpr([mx](double x) { return std::exp(x - mx); });  // scalar, see sigmoid
      v.row(i) = e / e.sum();
    }
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix](Tape& tp) {
      const Mat& g = grd(tp, id);
      const Mat& y = val(tp, id);
      Mat gx(g.rows(), g.cols());
      for (int i = 0; i < g.rows(); ++i) {
        double dot = g.row(i).dot(y.row(i));
        gx.row(i) = y.row(i).array() * (g.row(i).array() - dot);
      }
      acc(tp, ix, gx);
    };
    return out;
  }

  static Var select_mean(Var x, std::vector<int> labels) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    if (static_cast<int>(labels.size()) != xv.rows())
      throw ArgumentError("select_mean: label count mismatch");
    auto ls = std::make_shared<std::vector<int>>(std::move(labels));
    double total = 0.0;
    for (int i = 0; i < xv.rows(); ++i) {
      int c = (*ls)[i];
      if (c < 0 || c >= xv.cols()) throw ArgumentError("select_mean: label out of range");
      total += xv(i, c);
    }
    Mat v(1, 1);
    v(0, 0) = total / static_cast<double>(xv.rows());
    int ix = x.id;
    Var out = make(t, std::move(v), rg(t, ix), nullptr);
    int id = out.id;
    t.nodes_[id].pull = [id, ix, ls](Tape& tp) {
      double g = grd(tp, id)(0, 0);
      const Mat& xval = val(tp, ix);
      Mat gx = Mat::Zero(xval.rows(), xval.cols());
      double w = g / static_cast<double>(xval.rows());
      for (int i = 0; i < xval.rows(); ++i) gx(i, (*ls)[i]) = w;
      acc(tp, ix, gx);
    };
    return out;
  }
};

Var add(Var a, Var b) { return TapeOps::add(a, b); }
Var sub(Var a, Var b) { return TapeOps::sub(a, b); }
Var mul(Var a, Var b) { return TapeOps::mul(a, b); }
Var scale(Var a, double s) { return TapeOps::scale(a, s); }
Var add_scalar(Var a, double c) { return TapeOps::add_scalar(a, c); }
Var neg(Var a) { return TapeOps::scale(a, -1.0); }
Var relu(Var a) { return TapeOps::relu(a); }
Var sigmoid(Var a) { return TapeOps::sigmoid(a); }
Var log_elem(Var a) { return TapeOps::log_elem(a); }
Var sqrt_elem(Var a) { return TapeOps::sqrt_elem(a); }
Var clamp_min(Var a, double lo) { return TapeOps::clamp_min(a, lo); }
Var add_rowvec(Var x, Var bias) { return TapeOps::add_rowvec(x, bias); }
Var sub_rowvec_const(Var x, const Eigen::RowVectorXd& r) {
  return TapeOps::sub_rowvec_const(x, r);
}
Var mul_rowvec_const(Var x, const Eigen::RowVectorXd& r) {
  return TapeOps::mul_rowvec_const(x, r);
}
Var colscale(Var x, Var col) { return TapeOps::colscale(x, col); }
Var colscale_const(Var x, const Eigen::VectorXd& col) { return TapeOps::colscale_const(x, col); }
Var matmul(Var a, Var b) { return TapeOps::matmul(a, b); }
Var matmul_tn(Var a, Var b) { return TapeOps::matmul_tn(a, b); }
Var sum_all(Var a) { return TapeOps::sum_all(a); }
Var row_sum(Var a) { return TapeOps::row_sum(a); }
Var neighbor_sum(Var x, std::shared_ptr<const EdgeList> edges) {
  return TapeOps::neighbor_sum(x, std::move(edges));
}
Var segment_sum(Var x, std::shared_ptr<const std::vector<int>> membership, int num_segments) {
  return TapeOps::segment_sum(x, std::move(membership), num_segments);
}
Var segment_mean(Var x, std::shared_ptr<const std::vector<int>> membership, int num_segments) {
  return TapeOps::segment_mean(x, std::move(membership), num_segments);
}
Var segment_max(Var x, std::shared_ptr<const std::vector<int>> membership, int num_segments) {
  return TapeOps::segment_max(x, std::move(membership), num_segments);
}
Var assignment_cols(Var p) { return TapeOps::assignment_cols(p); }
Var pairwise_sqdist(Var z, Var p) { return TapeOps::pairwise_sqdist(z, p); }
Var gather_rows(Var x, std::vector<int> idx) { return TapeOps::gather_rows(x, std::move(idx)); }
Var masked_logsumexp(Var x, const Eigen::MatrixXd& mask) {
  return TapeOps::masked_logsumexp(x, mask);
}
Var row_normalize(Var x) { return TapeOps::row_normalize(x); }
Var softmax_rows(Var x) { return TapeOps::softmax_rows(x); }
Var select_mean(Var x, std::vector<int> labels) {
  return TapeOps::select_mean(x, std::move(labels));
}
Var affine(Var x, Var w, Var bias) { return add_rowvec(matmul(x, w), bias); }

}  // namespace protograph
