#include "protograph/prototypes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "protograph/errors.hpp"

namespace protograph {

int PrototypeSet::active_count() const {
  int n = 0;
  for (char a : active) n += (a != 0);
  return n;
}

int PrototypeSet::active_count_in_class(int cls) const {
  int n = 0;
  for (int m = 0; m < total(); ++m) n += (active[m] && class_of[m] == cls);
  return n;
}

std::vector<int> PrototypeSet::active_indices() const {
  std::vector<int> out;
  for (int m = 0; m < total(); ++m)
    if (active[m]) out.push_back(m);
  return out;
}

std::vector<int> PrototypeSet::active_indices_of_class(int cls) const {
  std::vector<int> out;
  for (int m = 0; m < total(); ++m)
    if (active[m] && class_of[m] == cls) out.push_back(m);
  return out;
}

void PrototypeSet::check_every_class_active() const {
  for (int c = 0; c < num_classes; ++c)
    if (active_count_in_class(c) == 0)
      throw NumericError("prototype set invariant violated: class " + std::to_string(c) +
                         " has no active prototype");
}

PrototypeSet init_prototypes(ParameterSet& params, int num_classes, int per_class,
                             int hidden_dim, RngStream& rng) {
  if (num_classes < 2 || per_class < 1)
    throw ArgumentError("init_prototypes: need >= 2 classes and >= 1 prototype per class");
  int m_total = num_classes * per_class;
  Eigen::MatrixXd vectors(m_total, hidden_dim);
  for (int m = 0; m < m_total; ++m) {
    for (int d = 0; d < hidden_dim; ++d) vectors(m, d) = rng.uniform();
    double norm = vectors.row(m).norm();
    if (norm > 0) vectors.row(m) /= norm;
  }
  Eigen::MatrixXd omega = Eigen::MatrixXd::Constant(m_total, num_classes, -0.5);
  PrototypeSet p;
  p.num_classes = num_classes;
  p.per_class = per_class;
  p.class_of.resize(m_total);
  p.active.assign(m_total, 1);
  for (int m = 0; m < m_total; ++m) {
    p.class_of[m] = m / per_class;
    omega(m, p.class_of[m]) = 1.0;
  }
  params.create("proto.vectors", std::move(vectors));
  params.create("proto.omega", std::move(omega));
  return p;
}

void init_phi_params(ParameterSet& params, int hidden_dim, RngStream& rng) {
  double s = std::sqrt(6.0 / hidden_dim);
  Eigen::MatrixXd w(hidden_dim, hidden_dim);
  for (long r = 0; r < w.rows(); ++r)
    for (long c = 0; c < w.cols(); ++c) w(r, c) = (2.0 * rng.uniform() - 1.0) * s;
  params.create("phi.w", std::move(w));
  params.create("phi.b", Eigen::MatrixXd::Zero(1, hidden_dim));
}

double similarity(const Eigen::RowVectorXd& z_sub, const Eigen::RowVectorXd& z_p) {
  if (z_sub.size() != z_p.size()) throw ArgumentError("similarity: dimension mismatch");
  double d2 = (z_sub - z_p).squaredNorm();
  return std::log((d2 + 1.0) / (d2 + kSimilarityEps));
}

Eigen::VectorXd similarity_vector(const Eigen::RowVectorXd& z_sub, const PrototypeSet& protos,
                                  const ParameterSet& params) {
  const Eigen::MatrixXd& vectors = params.at("proto.vectors");
  std::vector<int> act = protos.active_indices();
  Eigen::VectorXd r(act.size());
  for (std::size_t i = 0; i < act.size(); ++i)
    r(static_cast<long>(i)) = similarity(z_sub, vectors.row(act[i]));
  return r;
}

Var similarity_matrix(Var z_sub, Var proto_rows) {
  Var d2 = pairwise_sqdist(z_sub, proto_rows);
  return sub(log_elem(add_scalar(d2, 1.0)), log_elem(add_scalar(d2, kSimilarityEps)));
}

Var variational_mi_loss(Var z_sub, const std::vector<int>& labels, const PrototypeSet& protos,
                        const TapeBinding& bind) {
  const long n = z_sub.rows();
  if (static_cast<long>(labels.size()) != n)
    throw ArgumentError("variational_mi_loss: label count mismatch");
  Var vectors = bind.at("proto.vectors");
  const Eigen::MatrixXd& vecs = vectors.value();

  Var zhat = affine(z_sub, bind.at("phi.w"), bind.at("phi.b"));
  const Eigen::MatrixXd& zhv = zhat.value();

  // Nearest-by-similarity active prototype of the true class; Eq. 7
  // similarity is strictly decreasing in distance, so nearest = most similar.
  std::vector<int> target(n);
  for (long i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int m : protos.active_indices_of_class(labels[i])) {
      double d2 = (zhv.row(i) - vecs.row(m)).squaredNorm();
      if (d2 < best) {
        best = d2;
        arg = m;
      }
    }
    if (arg < 0)
      throw NumericError("variational_mi_loss: class " + std::to_string(labels[i]) +
                         " has no active prototype");
    target[i] = arg;
  }
  Var targets = gather_rows(vectors, target);
  Var diff = sub(zhat, targets);
  // mean over graphs of 0.5 ||diff_i||^2  ==  sum(diff^2) / (2 n)
  return scale(sum_all(mul(diff, diff)), 0.5 / static_cast<double>(n));
}

Var contrastive_mi_loss(Var z_sub, const std::vector<int>& labels, const PrototypeSet& protos,
                        const TapeBinding& bind, double tau) {
  if (tau <= 0.0) throw ArgumentError("contrastive_mi_loss: tau must be > 0");
  const long n = z_sub.rows();
  if (static_cast<long>(labels.size()) != n)
    throw ArgumentError("contrastive_mi_loss: label count mismatch");
  std::vector<int> act = protos.active_indices();
  const long m_act = static_cast<long>(act.size());

  Eigen::MatrixXd pos_mask = Eigen::MatrixXd::Zero(n, m_act);
  Eigen::MatrixXd neg_mask = Eigen::MatrixXd::Zero(n, m_act);
  for (long i = 0; i < n; ++i) {
    bool has_pos = false, has_neg = false;
    for (long j = 0; j < m_act; ++j) {
      if (protos.class_of[act[j]] == labels[i]) {
        pos_mask(i, j) = 1.0;
        has_pos = true;
      } else {
        neg_mask(i, j) = 1.0;
        has_neg = true;
      }
    }
    if (!has_pos)
      throw NumericError("contrastive_mi_loss: no active prototype for class " +
                         std::to_string(labels[i]));
    if (!has_neg)
      throw ArgumentError("contrastive_mi_loss: no negative prototypes exist (single class?)");
  }

  Var proto_rows = gather_rows(bind.at("proto.vectors"), act);
  Var g = scale(similarity_matrix(z_sub, proto_rows), 1.0 / tau);
  Var lse_pos = masked_logsumexp(g, pos_mask);
  Var lse_neg = masked_logsumexp(g, neg_mask);
  Var per_graph = sub(lse_pos, lse_neg);  // n x 1
  return scale(sum_all(per_graph), -1.0 / static_cast<double>(n));
}

Eigen::MatrixXd prototype_pair_similarity(const PrototypeSet& protos, const ParameterSet& params,
                                          const Eigen::MatrixXd& train_sub_embeddings) {
  if (train_sub_embeddings.rows() == 0)
    throw ArgumentError("prototype_pair_similarity: no embeddings");
  const Eigen::MatrixXd& vectors = params.at("proto.vectors");
  std::vector<int> act = protos.active_indices();
  const long n = train_sub_embeddings.rows();

  // g values per (embedding, active prototype)
  Eigen::MatrixXd g(n, static_cast<long>(act.size()));
  for (long i = 0; i < n; ++i)
    for (std::size_t j = 0; j < act.size(); ++j)
      g(i, static_cast<long>(j)) =
          similarity(train_sub_embeddings.row(i), vectors.row(act[j]));

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(protos.total(), protos.total());
  for (std::size_t a = 0; a < act.size(); ++a)
    for (std::size_t b = a + 1; b < act.size(); ++b) {
      double disparity = (g.col(static_cast<long>(a)) - g.col(static_cast<long>(b)))
                             .squaredNorm();
      double val = 1.0 / (disparity + 1e-12);
      h(act[a], act[b]) = val;
      h(act[b], act[a]) = val;
    }
  return h;
}

std::vector<MergeEvent> merge_prototypes(PrototypeSet& protos, ParameterSet& params,
                                         const Eigen::MatrixXd& h, double xi_percent,
                                         int epoch) {
  if (xi_percent < 0.0 || xi_percent >= 100.0)
    throw ArgumentError("merge_prototypes: xi must be in [0, 100)");
  int target = static_cast<int>(std::floor(xi_percent / 100.0 * protos.active_count()));
  std::vector<MergeEvent> events;
  if (target == 0) return events;

  struct Pair {
    double h;
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < protos.total(); ++i)
    for (int j = i + 1; j < protos.total(); ++j)
      if (protos.active[i] && protos.active[j] && h(i, j) > 0.0)
        pairs.push_back({h(i, j), i, j});
  // Descending similarity; ties resolve lexicographically for determinism.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.h != b.h) return a.h > b.h;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  Eigen::MatrixXd& omega = params.at("proto.omega");
  for (const Pair& p : pairs) {
    if (static_cast<int>(events.size()) >= target) break;
    if (!protos.active[p.i] || !protos.active[p.j]) continue;
    // Removal must leave the removed prototype's class non-empty.
    if (protos.active_count_in_class(protos.class_of[p.j]) < 2) continue;
    omega.row(p.i) += omega.row(p.j);
    omega.row(p.j).setZero();
    protos.active[p.j] = 0;
    events.push_back({p.i, p.j, p.h, epoch});
  }
  protos.check_every_class_active();
  return events;
}

}  // namespace protograph
