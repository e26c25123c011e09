#include "protograph/gin.hpp"

#include <cmath>

#include "protograph/errors.hpp"

namespace protograph {

ReadoutMode readout_from_string(const std::string& s) {
  if (s == "max") return ReadoutMode::Max;
  if (s == "mean") return ReadoutMode::Mean;
  if (s == "sum") return ReadoutMode::Sum;
  throw ArgumentError("unknown readout mode: " + s);
}

std::string readout_to_string(ReadoutMode m) {
  switch (m) {
    case ReadoutMode::Max: return "max";
    case ReadoutMode::Mean: return "mean";
    case ReadoutMode::Sum: return "sum";
  }
  throw ArgumentError("invalid readout mode value");
}

namespace {

Eigen::MatrixXd he_uniform(long rows, long cols, long fan_in, RngStream& rng) {
  double s = std::sqrt(6.0 / static_cast<double>(fan_in));
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = (2.0 * rng.uniform() - 1.0) * s;
  return m;
}

std::string layer_name(int layer, const char* part) {
  return "gin.l" + std::to_string(layer) + "." + part;
}

}  // namespace

void init_gin_params(ParameterSet& params, int feature_dim, const GinConfig& cfg,
                     RngStream& rng) {
  if (cfg.layers < 1 || cfg.hidden_dim < 1)
    throw ArgumentError("init_gin_params: layers and hidden_dim must be >= 1");
  int in_dim = feature_dim;
  for (int l = 0; l < cfg.layers; ++l) {
    params.create(layer_name(l, "w1"), he_uniform(in_dim, cfg.hidden_dim, in_dim, rng));
    params.create(layer_name(l, "b1"), Eigen::MatrixXd::Zero(1, cfg.hidden_dim));
    params.create(layer_name(l, "w2"),
                  he_uniform(cfg.hidden_dim, cfg.hidden_dim, cfg.hidden_dim, rng));
    params.create(layer_name(l, "b2"), Eigen::MatrixXd::Zero(1, cfg.hidden_dim));
    in_dim = cfg.hidden_dim;
  }
}

Var gin_forward(const Batch& batch, const TapeBinding& bind, const GinConfig& cfg) {
  Tape& tape = bind.tape();
  Var h = tape.constant(batch.features);
  for (int l = 0; l < cfg.layers; ++l) {
    Var agg = neighbor_sum(h, batch.directed_edges);
    Var a = cfg.epsilon_gin == 0.0 ? add(h, agg) : add(scale(h, 1.0 + cfg.epsilon_gin), agg);
    Var hid = relu(affine(a, bind.at(layer_name(l, "w1")), bind.at(layer_name(l, "b1"))));
    h = affine(hid, bind.at(layer_name(l, "w2")), bind.at(layer_name(l, "b2")));
  }
  return h;
}

Var readout(Var z, const Batch& batch, ReadoutMode mode) {
  switch (mode) {
    case ReadoutMode::Max: return segment_max(z, batch.membership, batch.num_graphs);
    case ReadoutMode::Mean: return segment_mean(z, batch.membership, batch.num_graphs);
    case ReadoutMode::Sum: return segment_sum(z, batch.membership, batch.num_graphs);
  }
  throw ArgumentError("invalid readout mode value");
}

Eigen::MatrixXd gin_node_embeddings(const Batch& batch, const ParameterSet& params,
                                    const GinConfig& cfg) {
  Tape tape;
  TapeBinding bind(tape, params, /*trainable=*/false);
  return gin_forward(batch, bind, cfg).value();
}

Eigen::RowVectorXd readout_rows(const Eigen::MatrixXd& h, const std::vector<int>& rows,
                                ReadoutMode mode) {
  if (rows.empty()) throw ArgumentError("readout_rows: empty node set");
  Eigen::RowVectorXd out;
  switch (mode) {
    case ReadoutMode::Max:
      out = h.row(rows[0]);
      for (std::size_t i = 1; i < rows.size(); ++i) out = out.cwiseMax(h.row(rows[i]));
      return out;
    case ReadoutMode::Mean:
      out = Eigen::RowVectorXd::Zero(h.cols());
      for (int r : rows) out += h.row(r);
      return out / static_cast<double>(rows.size());
    case ReadoutMode::Sum:
      out = Eigen::RowVectorXd::Zero(h.cols());
      for (int r : rows) out += h.row(r);
      return out;
  }
  throw ArgumentError("invalid readout mode value");
}

}  // namespace protograph
