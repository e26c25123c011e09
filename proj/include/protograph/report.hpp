#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "protograph/metrics.hpp"
#include "protograph/model.hpp"

namespace protograph {

struct PrototypeReportEntry {
  int prototype = -1;
  int source_graph = -1;           // index into the source graph list; -1 if never projected
  std::vector<int> source_nodes;
  double similarity = 0.0;         // r_m
  Eigen::RowVectorXd omega_row;    // 1 x K
  Eigen::RowVectorXd points;       // r_m * omega_row
};

struct ReasoningReport {
  std::vector<int> selected_nodes;      // top-k by keep probability
  Eigen::VectorXd node_p;
  std::vector<PrototypeReportEntry> entries;
  Eigen::RowVectorXd total_points;      // per class; equals the logits
  int predicted_class = -1;
};

ReasoningReport build_reasoning_report(const ModelState& state, const Graph& graph,
                                       const std::vector<ProjectionResult>& projections,
                                       double k);

// Input graph with importance labels (3 decimals); selected nodes and edges
// with both endpoints selected are drawn bold (penwidth 3).
void write_graph_dot(const std::filesystem::path& path, const Graph& graph,
                     const Eigen::VectorXd& node_p, const std::vector<int>& selected);

// Plain rendering of a projected prototype subgraph.
void write_subgraph_dot(const std::filesystem::path& path, const Graph& source,
                        const std::vector<int>& nodes, const std::string& label);

// Writes report.txt, report.json, graph.dot and one proto_<id>.dot per
// projected prototype into out_dir.
void emit_reasoning_report(const ModelState& state, const Graph& graph,
                           const std::vector<ProjectionResult>& projections,
                           const std::vector<Graph>& source_graphs,
                           const std::filesystem::path& out_dir, double k = 0.5);

}  // namespace protograph
