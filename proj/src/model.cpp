#include "protograph/model.hpp"

#include <cmath>

#include "protograph/errors.hpp"

namespace protograph {

MiMode mi_mode_from_string(const std::string& s) {
  if (s == "variational") return MiMode::Variational;
  if (s == "contrastive") return MiMode::Contrastive;
  throw ArgumentError("unknown mi_mode: " + s);
}

std::string mi_mode_to_string(MiMode m) {
  return m == MiMode::Variational ? "variational" : "contrastive";
}

void PgibConfig::validate() const {
  if (alpha1 < 0 || alpha2 < 0 || alpha3 < 0)
    throw ArgumentError("config: loss weights must be >= 0");
  if (epochs < 1) throw ArgumentError("config: epochs must be >= 1");
  if (merge_period < 1) throw ArgumentError("config: merge_period must be >= 1");
  if (batch_size < 1) throw ArgumentError("config: batch_size must be >= 1");
  if (per_class < 1) throw ArgumentError("config: per_class must be >= 1");
  if (tau <= 0) throw ArgumentError("config: tau must be > 0");
  if (xi < 0 || xi >= 100) throw ArgumentError("config: xi must be in [0, 100)");
  if (temperature <= 0) throw ArgumentError("config: temperature must be > 0");
}

ModelState init_model(int feature_dim, int num_classes, const PgibConfig& cfg) {
  cfg.validate();
  ModelState state;
  state.cfg = cfg;
  RngStream rng(cfg.seed);
  RngStream gin_rng = rng.fork(1);
  RngStream gate_rng = rng.fork(2);
  RngStream proto_rng = rng.fork(3);
  RngStream phi_rng = rng.fork(4);
  init_gin_params(state.params, feature_dim, cfg.gin, gin_rng);
  init_gate_params(state.params, cfg.gin.hidden_dim, gate_rng);
  state.protos =
      init_prototypes(state.params, num_classes, cfg.per_class, cfg.gin.hidden_dim, proto_rng);
  init_phi_params(state.params, cfg.gin.hidden_dim, phi_rng);
  return state;
}

Var classification_loss(Var pi, const std::vector<int>& labels) {
  Var clamped = clamp_min(pi, 1e-12);
  return neg(select_mean(log_elem(clamped), labels));
}

double total_of(const LossBreakdown& parts, const PgibConfig& cfg) {
  return parts.l_cls + cfg.alpha1 * parts.l_mi1 + cfg.alpha2 * parts.l_mi2 +
         cfg.alpha3 * parts.l_con;
}

ForwardResult forward_pass(const Batch& batch, const ModelState& state, const TapeBinding& bind,
                           RngStream& rng, GateMode mode, const NoiseStats* stats_override) {
  const PgibConfig& cfg = state.cfg;
  ForwardResult out;

  out.h = gin_forward(batch, bind, cfg.gin);
  CompressResult comp = compress_nodes(out.h, bind, rng, mode, cfg.temperature, stats_override);
  out.assignment = comp.assignment;
  out.stats = comp.stats;
  out.z_sub = readout(comp.z, batch, cfg.gin.readout_mode);

  std::vector<int> act = state.protos.active_indices();
  Var proto_rows = gather_rows(bind.at("proto.vectors"), act);
  Var omega_rows = gather_rows(bind.at("proto.omega"), act);
  out.r = similarity_matrix(out.z_sub, proto_rows);
  out.logits = matmul(out.r, omega_rows);
  out.pi = softmax_rows(out.logits);

  Var l_cls = classification_loss(out.pi, batch.labels);
  Var l_mi1 = mi_upper_bound_loss(out.assignment, out.h, out.stats, batch);
  Var l_mi2 = cfg.mi_mode == MiMode::Variational
                  ? variational_mi_loss(out.z_sub, batch.labels, state.protos, bind)
                  : contrastive_mi_loss(out.z_sub, batch.labels, state.protos, bind, cfg.tau);
  Var l_con = connectivity_loss(out.assignment, batch);

  out.loss = add(add(scale(l_mi1, cfg.alpha1), scale(l_mi2, cfg.alpha2)),
                 add(scale(l_con, cfg.alpha3), l_cls));
  out.breakdown.l_cls = l_cls.value()(0, 0);
  out.breakdown.l_mi1 = l_mi1.value()(0, 0);
  out.breakdown.l_mi2 = l_mi2.value()(0, 0);
  out.breakdown.l_con = l_con.value()(0, 0);
  out.breakdown.total = total_of(out.breakdown, cfg);
  return out;
}

Prediction predict(const Graph& graph, const ModelState& state) {
  std::vector<Graph> one{graph};
  Batch batch = batch_graphs(one);
  Tape tape;
  TapeBinding bind(tape, state.params, /*trainable=*/false);
  RngStream rng(0);  // unused in infer mode

  Var h = gin_forward(batch, bind, state.cfg.gin);
  CompressResult comp = compress_nodes(h, bind, rng, GateMode::Infer, state.cfg.temperature);
  Var z_sub = readout(comp.z, batch, state.cfg.gin.readout_mode);

  std::vector<int> act = state.protos.active_indices();
  Var proto_rows = gather_rows(bind.at("proto.vectors"), act);
  Var omega_rows = gather_rows(bind.at("proto.omega"), act);
  Var r = similarity_matrix(z_sub, proto_rows);
  Var logits = matmul(r, omega_rows);
  Var pi = softmax_rows(logits);

  Prediction p;
  p.pi = pi.value().row(0);
  p.r = r.value().row(0);
  p.node_p = comp.assignment.p.value().col(0);
  p.z_sub = z_sub.value().row(0);
  long arg = 0;
  p.pi.maxCoeff(&arg);
  p.predicted_class = static_cast<int>(arg);
  return p;
}

}  // namespace protograph
