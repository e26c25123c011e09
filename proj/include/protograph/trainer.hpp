#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "protograph/model.hpp"

namespace protograph {

struct EpochMetrics {
  int epoch = 0;
  std::string split;  // "train" or "val"
  double accuracy = 0.0;
  LossBreakdown losses;
};

struct TrainState {
  ModelState model;            // final-epoch parameters
  ModelState best_model;       // best-validation checkpoint (ties: earlier epoch)
  int best_epoch = 0;
  double best_val_accuracy = -1.0;
  std::vector<EpochMetrics> history;
  std::vector<MergeEvent> merges;
  std::vector<ProjectionResult> projections;  // from the last projection event
};

// Full schedule: minibatch Adam epochs; at epochs t >= merge_start with
// t % merge_period == 0 (merging enabled), recompute training subgraph
// embeddings in infer mode, project prototypes, then merge. Writes
// config.txt, metrics.csv, events.log and checkpoints into out_dir when
// given. Deterministic given (dataset, split, cfg).
TrainState train(const GraphDataset& ds, const SplitSpec& split, const PgibConfig& cfg,
                 const std::optional<std::filesystem::path>& out_dir);

// Serialization of a whole model (parameters + prototype metadata + config
// essentials) through the named-array container.
void save_model(const ModelState& state, const std::filesystem::path& path);
ModelState load_model(const std::filesystem::path& path);

// Canonical key-value config snapshot (sorted keys, "key = value" lines).
std::string config_text(const PgibConfig& cfg, const std::string& dataset_name);

double accuracy(const ModelState& state, const std::vector<Graph>& graphs,
                const std::vector<int>& indices);

}  // namespace protograph
