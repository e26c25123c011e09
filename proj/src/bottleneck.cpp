#include "protograph/bottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "protograph/errors.hpp"
#include "protograph/gumbel.hpp"

namespace protograph {

NoiseStats batch_noise_stats(const Eigen::MatrixXd& h_values) {
  if (h_values.rows() == 0) throw ArgumentError("batch_noise_stats: empty embedding matrix");
  NoiseStats s;
  s.mu = h_values.colwise().mean();
  Eigen::ArrayXXd centered = h_values.rowwise() - s.mu;
  Eigen::RowVectorXd var =
      (centered * centered).colwise().sum() / static_cast<double>(h_values.rows());
  s.sigma = var.array().sqrt().max(1e-6);
  return s;
}

void init_gate_params(ParameterSet& params, int hidden_dim, RngStream& rng) {
  double s1 = std::sqrt(6.0 / hidden_dim);
  Eigen::MatrixXd w1(hidden_dim, hidden_dim);
  for (long r = 0; r < w1.rows(); ++r)
    for (long c = 0; c < w1.cols(); ++c) w1(r, c) = (2.0 * rng.uniform() - 1.0) * s1;
  Eigen::MatrixXd w2(hidden_dim, 1);
  for (long r = 0; r < w2.rows(); ++r) w2(r, 0) = (2.0 * rng.uniform() - 1.0) * s1;
  params.create("gate.w1", std::move(w1));
  params.create("gate.b1", Eigen::MatrixXd::Zero(1, hidden_dim));
  params.create("gate.w2", std::move(w2));
  params.create("gate.b2", Eigen::MatrixXd::Zero(1, 1));
}

CompressResult compress_nodes(Var h, const TapeBinding& bind, RngStream& rng, GateMode mode,
                              double temperature, const NoiseStats* stats_override) {
  Tape& tape = bind.tape();
  const Eigen::MatrixXd& hv = h.value();
  const long n = hv.rows();
  if (n == 0) throw ArgumentError("compress_nodes: empty embedding matrix");

  Var hid = relu(affine(h, bind.at("gate.w1"), bind.at("gate.b1")));
  Var p = sigmoid(affine(hid, bind.at("gate.w2"), bind.at("gate.b2")));  // n x 1

  NoiseStats stats = stats_override ? *stats_override : batch_noise_stats(hv);

  Var lambda;
  Eigen::MatrixXd eps(n, hv.cols());
  if (mode == GateMode::Train) {
    if (temperature <= 0.0) throw ArgumentError("compress_nodes: temperature must be > 0");
    // Relaxed Bernoulli gate on the tape with frozen Gumbel draws:
    // lambda = sigmoid((logit(clamp(p)) + (g1 - g0)) / T).
    Eigen::MatrixXd diff = gumbel_diff_draws(n, 1, rng);
    Var pc = clamp_min(p, 1e-6);
    Var one_minus = clamp_min(add_scalar(neg(p), 1.0), 1e-6);
    Var logit = sub(log_elem(pc), log_elem(one_minus));
    lambda = sigmoid(scale(add(logit, tape.constant(diff)), 1.0 / temperature));
    for (long i = 0; i < n; ++i)
      for (long d = 0; d < hv.cols(); ++d) eps(i, d) = stats.mu(d) + stats.sigma(d) * rng.normal();
  } else {
    lambda = p;
    eps = stats.mu.replicate(n, 1);
  }

  Var one_minus_lambda = add_scalar(neg(lambda), 1.0);
  Var z = add(colscale(h, lambda), colscale(tape.constant(eps), one_minus_lambda));

  CompressResult out;
  out.z = z;
  out.assignment.p = p;
  out.assignment.lambda = lambda;
  out.assignment.S = assignment_cols(p);
  out.stats = stats;
  return out;
}

Var mi_upper_bound_loss(const NodeAssignment& assignment, Var h, const NoiseStats& stats,
                        const Batch& batch) {
  const long d_dim = h.cols();
  for (int c : batch.node_counts)
    if (c == 0) throw ArgumentError("mi_upper_bound_loss: empty graph in batch");

  Var one_minus_lambda = add_scalar(neg(assignment.lambda), 1.0);
  Var a_per_graph = segment_sum(mul(one_minus_lambda, one_minus_lambda), batch.membership,
                                batch.num_graphs);  // G x 1
  Var term1 = scale(log_elem(clamp_min(a_per_graph, 1e-6)), -0.5);

  Eigen::VectorXd inv_2n(batch.num_graphs);
  Eigen::VectorXd inv_2nd(batch.num_graphs);
  for (int g = 0; g < batch.num_graphs; ++g) {
    inv_2n(g) = 1.0 / (2.0 * batch.node_counts[g]);
    inv_2nd(g) = 1.0 / (2.0 * batch.node_counts[g] * static_cast<double>(d_dim));
  }
  Var term2 = colscale_const(a_per_graph, inv_2n);

  Eigen::RowVectorXd inv_sigma = stats.sigma.array().inverse();
  Var resid = mul_rowvec_const(sub_rowvec_const(h, stats.mu), inv_sigma);
  Var weighted = colscale(resid, assignment.lambda);
  Var b = segment_sum(weighted, batch.membership, batch.num_graphs);  // G x D
  Var b2 = row_sum(mul(b, b));                                        // G x 1
  Var term3 = colscale_const(b2, inv_2nd);

  Var per_graph = add(add(term1, term2), term3);
  return scale(sum_all(per_graph), 1.0 / batch.num_graphs);
}

Var connectivity_loss(const NodeAssignment& assignment, const Batch& batch) {
  Tape& tape = *assignment.S.tape;
  Var as = neighbor_sum(assignment.S, batch.directed_edges);  // A S, n x 2
  Var stas = matmul_tn(assignment.S, as);                     // 2 x 2
  Var normed = row_normalize(stas);
  Var diff = sub(normed, tape.constant(Eigen::MatrixXd::Identity(2, 2)));
  return sqrt_elem(sum_all(mul(diff, diff)));
}

std::vector<int> select_topk_nodes(const Eigen::VectorXd& p, double k) {
  if (k <= 0.0 || k >= 1.0) throw ArgumentError("select_topk_nodes: k must be in (0,1)");
  const long n = p.size();
  if (n == 0) return {};
  long keep = static_cast<long>(std::ceil(k * static_cast<double>(n)));
  keep = std::min(keep, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Descending by p; equal scores resolve to the lower node index.
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return p(a) > p(b); });
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace protograph
