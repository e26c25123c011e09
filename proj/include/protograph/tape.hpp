#pragma once

#include <Eigen/Dense>

#include <deque>

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace protograph {

using Mat = Eigen::MatrixXd;
using EdgeList = std::vector<std::pair<int, int>>;

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid as long as the tape lives.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Mat& value() const;
  long rows() const { return value().rows(); }
  long cols() const { return value().cols(); }
};

// Reverse-mode tape over dense double matrices. Each operation records a
// pull-back closure; backward() runs them in reverse creation order. A tape
// is built per forward evaluation and discarded afterwards.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf with gradient tracking (a trainable parameter).
  Var param(Mat value);
  // Leaf without gradient tracking (inputs, frozen draws, detached stats).
  Var constant(Mat value);

  void backward(Var scalar_loss);

  const Mat& value(Var v) const;
  // Gradient of the last backward() w.r.t. v; zeros if v was never reached.
  Mat grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  friend struct Var;
  friend class TapeOps;

  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    std::function<void(Tape&)> pull;
  };

  int push(Mat value, bool requires_grad, std::function<void(Tape&)> pull);
  void accumulate(int id, const Mat& g);

  // Deque keeps references returned by value() stable while new nodes are
  // appended mid-expression (a vector would reallocate and dangle them).
  std::deque<Node> nodes_;
};

// ---- operations ------------------------------------------------------------
// Unless stated otherwise shapes must match exactly; violations throw.

Var add(Var a, Var b);                 // a + b
Var sub(Var a, Var b);                 // a - b
Var mul(Var a, Var b);                 // elementwise product
Var scale(Var a, double s);            // a * s
Var add_scalar(Var a, double c);       // a + c
Var neg(Var a);                        // -a
Var relu(Var a);
Var sigmoid(Var a);
Var log_elem(Var a);                   // elementwise natural log; values must be > 0
Var sqrt_elem(Var a);                  // elementwise sqrt; values must be >= 0
Var clamp_min(Var a, double lo);       // max(a, lo); clamped entries get zero gradient

Var add_rowvec(Var x, Var bias);                 // bias: 1 x D, broadcast over rows
Var sub_rowvec_const(Var x, const Eigen::RowVectorXd& r);
Var mul_rowvec_const(Var x, const Eigen::RowVectorXd& r);
Var colscale(Var x, Var col);                    // col: N x 1, broadcast over columns
Var colscale_const(Var x, const Eigen::VectorXd& col);

Var matmul(Var a, Var b);              // a * b
Var matmul_tn(Var a, Var b);           // a^T * b

Var sum_all(Var a);                    // 1 x 1
Var row_sum(Var a);                    // N x D -> N x 1

// out[v, :] = sum over directed edges (u, v) of x[u, :]. Adjacency action.
Var neighbor_sum(Var x, std::shared_ptr<const EdgeList> edges);

// Per-graph row reductions; membership[i] in [0, num_segments).
Var segment_sum(Var x, std::shared_ptr<const std::vector<int>> membership, int num_segments);
Var segment_mean(Var x, std::shared_ptr<const std::vector<int>> membership, int num_segments);
Var segment_max(Var x, std::shared_ptr<const std::vector<int>> membership, int num_segments);

// [p, 1-p] from an N x 1 column of probabilities.
Var assignment_cols(Var p);

// Squared Euclidean distances between rows: (G x D, M x D) -> G x M.
Var pairwise_sqdist(Var z, Var p);

// Row gather: out[i, :] = x[idx[i], :]; backward scatter-adds.
Var gather_rows(Var x, std::vector<int> idx);

// Row-wise log of the sum of exp over entries where mask != 0; every row of
// the mask must select at least one entry. mask is not differentiated.
Var masked_logsumexp(Var x, const Eigen::MatrixXd& mask);

// Rows scaled to sum to one; all-zero rows stay zero.
Var row_normalize(Var x);

Var softmax_rows(Var x);

// (1/N) * sum_i x[i, labels[i]]  ->  1 x 1
Var select_mean(Var x, std::vector<int> labels);

// affine helper: x * w + bias (bias broadcast over rows)
Var affine(Var x, Var w, Var bias);

}  // namespace protograph
