#include "protograph/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "protograph/bottleneck.hpp"
#include "protograph/errors.hpp"

namespace protograph {

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ReasoningReport build_reasoning_report(const ModelState& state, const Graph& graph,
                                       const std::vector<ProjectionResult>& projections,
                                       double k) {
  Prediction pred = predict(graph, state);
  const Eigen::MatrixXd& omega = state.params.at("proto.omega");
  std::vector<int> act = state.protos.active_indices();

  ReasoningReport rep;
  rep.node_p = pred.node_p;
  rep.selected_nodes = select_topk_nodes(pred.node_p, k);
  rep.predicted_class = pred.predicted_class;

  Eigen::MatrixXd omega_act(static_cast<long>(act.size()), omega.cols());
  for (std::size_t i = 0; i < act.size(); ++i)
    omega_act.row(static_cast<long>(i)) = omega.row(act[i]);
  // Same arithmetic as the prediction logits: r (1 x m) times active omega.
  rep.total_points = pred.r.transpose() * omega_act;

  for (std::size_t i = 0; i < act.size(); ++i) {
    PrototypeReportEntry e;
    e.prototype = act[i];
    e.similarity = pred.r(static_cast<long>(i));
    e.omega_row = omega.row(act[i]);
    e.points = e.similarity * e.omega_row;
    for (const ProjectionResult& pr : projections)
      if (pr.prototype == act[i]) {
        e.source_graph = pr.source_graph;
        e.source_nodes = pr.nodes;
      }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

void write_graph_dot(const std::filesystem::path& path, const Graph& graph,
                     const Eigen::VectorXd& node_p, const std::vector<int>& selected) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestionError("cannot write " + path.string());
  std::vector<char> sel(graph.node_count, 0);
  for (int n : selected) sel[n] = 1;
  os << "graph input {\n  node [shape=circle];\n";
  for (int n = 0; n < graph.node_count; ++n) {
    os << "  n" << n << " [label=\"" << fmt3(node_p(n)) << "\"";
    if (sel[n]) os << ", penwidth=3, style=bold";
    os << "];\n";
  }
  for (const auto& [u, v] : graph.edges) {
    os << "  n" << u << " -- n" << v;
    if (sel[u] && sel[v]) os << " [penwidth=3]";
    os << ";\n";
  }
  os << "}\n";
}

void write_subgraph_dot(const std::filesystem::path& path, const Graph& source,
                        const std::vector<int>& nodes, const std::string& label) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestionError("cannot write " + path.string());
  std::vector<char> in_set(source.node_count, 0);
  for (int n : nodes) in_set[n] = 1;
  os << "graph prototype {\n  label=\"" << label << "\";\n  node [shape=circle];\n";
  for (int n : nodes) os << "  n" << n << ";\n";
  for (const auto& [u, v] : source.edges)
    if (in_set[u] && in_set[v]) os << "  n" << u << " -- n" << v << ";\n";
  os << "}\n";
}

void emit_reasoning_report(const ModelState& state, const Graph& graph,
                           const std::vector<ProjectionResult>& projections,
                           const std::vector<Graph>& source_graphs,
                           const std::filesystem::path& out_dir, double k) {
  std::filesystem::create_directories(out_dir);
  ReasoningReport rep = build_reasoning_report(state, graph, projections, k);

  // Human-readable record.
  {
    std::ofstream os(out_dir / "report.txt", std::ios::binary);
    if (!os) throw IngestionError("cannot write report.txt in " + out_dir.string());
    os << "graph: " << graph.graph_id << "\n";
    os << "predicted class: " << rep.predicted_class << "\n";
    os << "selected subgraph nodes (top " << fmt3(k) << "): ";
    for (std::size_t i = 0; i < rep.selected_nodes.size(); ++i)
      os << (i ? ", " : "") << rep.selected_nodes[i];
    os << "\n\nprototype contributions:\n";
    for (const PrototypeReportEntry& e : rep.entries) {
      os << "  prototype " << e.prototype << ": similarity " << fmt6(e.similarity);
      if (e.source_graph >= 0) {
        os << ", projected from graph " << e.source_graph << " nodes {";
        for (std::size_t i = 0; i < e.source_nodes.size(); ++i)
          os << (i ? "," : "") << e.source_nodes[i];
        os << "}";
      }
      os << "\n    points per class:";
      for (long c = 0; c < e.points.cols(); ++c) os << " " << fmt6(e.points(c));
      os << "\n";
    }
    os << "\ntotal points per class:";
    for (long c = 0; c < rep.total_points.cols(); ++c)
      os << " " << fmt6(rep.total_points(c));
    os << "\n";
  }

  // Machine-readable record.
  {
    nlohmann::json j;
    j["graph_id"] = graph.graph_id;
    j["predicted_class"] = rep.predicted_class;
    j["selected_nodes"] = rep.selected_nodes;
    j["node_importance"] = std::vector<double>(rep.node_p.data(),
                                               rep.node_p.data() + rep.node_p.size());
    j["total_points"] = std::vector<double>(rep.total_points.data(),
                                            rep.total_points.data() + rep.total_points.size());
    j["prototypes"] = nlohmann::json::array();
    for (const PrototypeReportEntry& e : rep.entries) {
      nlohmann::json je;
      je["id"] = e.prototype;
      je["similarity"] = e.similarity;
      je["omega"] = std::vector<double>(e.omega_row.data(),
                                        e.omega_row.data() + e.omega_row.size());
      je["points"] = std::vector<double>(e.points.data(), e.points.data() + e.points.size());
      if (e.source_graph >= 0) {
        je["source_graph"] = e.source_graph;
        je["source_nodes"] = e.source_nodes;
      }
      j["prototypes"].push_back(std::move(je));
    }
    std::ofstream os(out_dir / "report.json", std::ios::binary);
    if (!os) throw IngestionError("cannot write report.json in " + out_dir.string());
    os << j.dump(2) << "\n";
  }

  write_graph_dot(out_dir / "graph.dot", graph, rep.node_p, rep.selected_nodes);
  for (const PrototypeReportEntry& e : rep.entries) {
    if (e.source_graph < 0 || e.source_graph >= static_cast<int>(source_graphs.size()))
      continue;
    write_subgraph_dot(out_dir / ("proto_" + std::to_string(e.prototype) + ".dot"),
                       source_graphs[e.source_graph], e.source_nodes,
                       "prototype " + std::to_string(e.prototype));
  }
}

}  // namespace protograph
