#pragma once

#include <string>

#include "protograph/binding.hpp"
#include "protograph/graph.hpp"
#include "protograph/params.hpp"
#include "protograph/rng.hpp"
#include "protograph/tape.hpp"

namespace protograph {

enum class ReadoutMode { Max, Mean, Sum };

ReadoutMode readout_from_string(const std::string& s);
std::string readout_to_string(ReadoutMode m);

struct GinConfig {
  int layers = 3;
  int hidden_dim = 128;
  double epsilon_gin = 0.0;
  ReadoutMode readout_mode = ReadoutMode::Max;
};

// Registers gin.l{i}.{w1,b1,w2,b2} with He-style fan-in uniform init.
void init_gin_params(ParameterSet& params, int feature_dim, const GinConfig& cfg,
                     RngStream& rng);

// Message passing: per layer, a = (1 + eps) * h + sum_{neighbors} h followed
// by affine -> ReLU -> affine. Returns the final layer's node embeddings
// (batch_nodes x hidden_dim).
Var gin_forward(const Batch& batch, const TapeBinding& bind, const GinConfig& cfg);

// Per-graph reduction of node rows.
Var readout(Var z, const Batch& batch, ReadoutMode mode);

// Forward pass without a gradient tape; same arithmetic, plain matrix out.
Eigen::MatrixXd gin_node_embeddings(const Batch& batch, const ParameterSet& params,
                                    const GinConfig& cfg);

// Readout over an explicit row subset of a plain embedding matrix.
Eigen::RowVectorXd readout_rows(const Eigen::MatrixXd& h, const std::vector<int>& rows,
                                ReadoutMode mode);

}  // namespace protograph
