#pragma once

#include <vector>

#include "protograph/binding.hpp"
#include "protograph/params.hpp"
#include "protograph/rng.hpp"

namespace protograph {

// Metadata for the prototype layer. The trainable arrays live in the
// ParameterSet under "proto.vectors" (M x hidden) and "proto.omega" (M x K);
// this struct tracks the fixed class layout and the active mask. Inactive
// prototypes keep their rows (shapes are immutable) but never enter
// predictions, and their omega rows are held at zero.
struct PrototypeSet {
  int num_classes = 0;
  int per_class = 0;          // J
  std::vector<int> class_of;  // length M = K * J, layout: class c owns rows [c*J, (c+1)*J)
  std::vector<char> active;   // length M

  int total() const { return static_cast<int>(class_of.size()); }
  int active_count() const;
  int active_count_in_class(int cls) const;
  std::vector<int> active_indices() const;
  std::vector<int> active_indices_of_class(int cls) const;
  void check_every_class_active() const;  // throws on an emptied class
};

// Registers proto.vectors (uniform(0,1) rows, L2-normalized) and proto.omega
// (1.0 at the owning class, -0.5 elsewhere).
PrototypeSet init_prototypes(ParameterSet& params, int num_classes, int per_class,
                             int hidden_dim, RngStream& rng);

// g = log((d^2 + 1) / (d^2 + eps_sim)), eps_sim = 1e-4.
inline constexpr double kSimilarityEps = 1e-4;
double similarity(const Eigen::RowVectorXd& z_sub, const Eigen::RowVectorXd& z_p);

// Similarity against every active prototype, in active_indices() order.
Eigen::VectorXd similarity_vector(const Eigen::RowVectorXd& z_sub, const PrototypeSet& protos,
                                  const ParameterSet& params);

// Tape version: similarities of each z_sub row against the given prototype
// rows (G x m_active).
Var similarity_matrix(Var z_sub, Var proto_rows);

// Variational bound: 0.5 * || phi(z_sub) - z_p* ||^2 per graph, batch mean;
// z_p* is the nearest active prototype of the graph's true class. Gradients
// flow into phi, z_sub, and the selected prototype rows.
Var variational_mi_loss(Var z_sub, const std::vector<int>& labels, const PrototypeSet& protos,
                        const TapeBinding& bind);

// Contrastive bound: -(1/n) sum_i [ LSE_{j in class(y_i)}(g_ij / tau)
//                                   - LSE_{k not in class(y_i)}(g_ik / tau) ].
Var contrastive_mi_loss(Var z_sub, const std::vector<int>& labels, const PrototypeSet& protos,
                        const TapeBinding& bind, double tau);

// Registers phi.w / phi.b (single affine map hidden -> hidden).
void init_phi_params(ParameterSet& params, int hidden_dim, RngStream& rng);

// Behavioral pair similarity over active prototypes:
//   h(i,j) = 1 / ( sum_over_embeddings (g_i - g_j)^2 + 1e-12 ).
// Returned as a full M x M symmetric matrix; entries involving inactive
// prototypes or the diagonal are 0.
Eigen::MatrixXd prototype_pair_similarity(const PrototypeSet& protos, const ParameterSet& params,
                                          const Eigen::MatrixXd& train_sub_embeddings);

struct MergeEvent {
  int kept = -1;
  int removed = -1;
  double pair_similarity = 0.0;
  int epoch = -1;
};

// Deactivates floor(xi/100 * active_count) prototypes, walking pairs by
// descending h. For an eligible pair the higher-indexed prototype is removed
// and its omega row is added onto the survivor's. A removal that would empty
// a class is skipped.
std::vector<MergeEvent> merge_prototypes(PrototypeSet& protos, ParameterSet& params,
                                         const Eigen::MatrixXd& h, double xi_percent,
                                         int epoch);

}  // namespace protograph
