#include "protograph/tu_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "protograph/errors.hpp"

namespace protograph {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& p, bool required) {
  std::ifstream is(p);
  if (!is) {
    if (required) throw IngestionError("missing dataset file: " + p.string());
    return {};
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines are tolerated.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

long parse_long(const std::string& s, const std::filesystem::path& file, std::size_t lineno) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError(file.filename().string() + ":" + std::to_string(lineno) +
                      ": expected integer, got '" + s + "'");
  }
}

}  // namespace

GraphDataset parse_tu_dataset(const std::filesystem::path& root_path, const std::string& name) {
  std::filesystem::path dir = root_path / name;
  auto indicator_lines = read_lines(dir / (name + "_graph_indicator.txt"), true);
  auto label_lines = read_lines(dir / (name + "_graph_labels.txt"), true);
  auto edge_lines = read_lines(dir / (name + "_A.txt"), true);
  auto node_label_lines = read_lines(dir / (name + "_node_labels.txt"), false);

  const std::size_t num_nodes = indicator_lines.size();
  const std::size_t num_graphs = label_lines.size();
  if (num_graphs == 0) throw FormatError(name + "_graph_labels.txt: no graphs");

  // node -> graph (both 0-based after conversion)
  std::vector<int> node_graph(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    long g = parse_long(indicator_lines[i], dir / (name + "_graph_indicator.txt"), i + 1);
    if (g < 1 || static_cast<std::size_t>(g) > num_graphs)
      throw FormatError(name + "_graph_indicator.txt:" + std::to_string(i + 1) +
                        ": graph id " + std::to_string(g) + " out of range");
    node_graph[i] = static_cast<int>(g - 1);
  }

  // graph labels remapped to contiguous 0..K-1 by sorted original value
  std::vector<long> raw_labels(num_graphs);
  std::set<long> label_values;
  for (std::size_t i = 0; i < num_graphs; ++i) {
    raw_labels[i] = parse_long(label_lines[i], dir / (name + "_graph_labels.txt"), i + 1);
    label_values.insert(raw_labels[i]);
  }
  std::map<long, int> label_remap;
  for (long v : label_values) label_remap.emplace(v, static_cast<int>(label_remap.size()));

  // node labels -> dense one-hot over sorted observed values
  int feature_dim = 1;
  std::vector<int> node_feature_index;
  if (!node_label_lines.empty()) {
    if (node_label_lines.size() != num_nodes)
      throw FormatError(name + "_node_labels.txt: row count " +
                        std::to_string(node_label_lines.size()) + " != node count " +
                        std::to_string(num_nodes));
    std::vector<long> raw(num_nodes);
    std::set<long> values;
    for (std::size_t i = 0; i < num_nodes; ++i) {
      raw[i] = parse_long(node_label_lines[i], dir / (name + "_node_labels.txt"), i + 1);
      values.insert(raw[i]);
    }
    std::map<long, int> remap;
    for (long v : values) remap.emplace(v, static_cast<int>(remap.size()));
    feature_dim = static_cast<int>(remap.size());
    node_feature_index.resize(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) node_feature_index[i] = remap[raw[i]];
  }

  // per-graph node numbering
  std::vector<int> local_index(num_nodes);
  std::vector<int> graph_size(num_graphs, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) local_index[i] = graph_size[node_graph[i]]++;

  GraphDataset ds;
  ds.name = name;
  ds.num_classes = static_cast<int>(label_remap.size());
  ds.feature_dim = feature_dim;
  ds.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    Graph& gr = ds.graphs[g];
    gr.node_count = graph_size[g];
    if (gr.node_count == 0)
      throw FormatError(name + ": graph " + std::to_string(g + 1) + " has no nodes");
    gr.label = label_remap.at(raw_labels[g]);
    gr.graph_id = name + "#" + std::to_string(g);
    gr.node_features = Eigen::MatrixXd::Zero(gr.node_count, feature_dim);
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    Graph& gr = ds.graphs[node_graph[i]];
    if (node_feature_index.empty()) {
      gr.node_features(local_index[i], 0) = 1.0;
    } else {
      gr.node_features(local_index[i], node_feature_index[i]) = 1.0;
    }
  }

  // edges: 1-indexed "i, j" rows, reciprocal rows deduplicated
  std::vector<std::set<std::pair<int, int>>> edge_sets(num_graphs);
  const std::filesystem::path a_file = dir / (name + "_A.txt");
  for (std::size_t ln = 0; ln < edge_lines.size(); ++ln) {
    const std::string& line = edge_lines[ln];
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError(name + "_A.txt:" + std::to_string(ln + 1) + ": expected 'i, j'");
    long u1 = parse_long(line.substr(0, comma), a_file, ln + 1);
    long v1 = parse_long(line.substr(comma + 1), a_file, ln + 1);
    if (u1 < 1 || v1 < 1 || static_cast<std::size_t>(u1) > num_nodes ||
        static_cast<std::size_t>(v1) > num_nodes)
      throw FormatError(name + "_A.txt:" + std::to_string(ln + 1) + ": node id out of range");
    int u = static_cast<int>(u1 - 1), v = static_cast<int>(v1 - 1);
    if (node_graph[u] != node_graph[v])
      throw FormatError(name + "_A.txt:" + std::to_string(ln + 1) +
                        ": edge crosses graph boundary");
    if (u == v) continue;  // drop self-loops
    int a = std::min(local_index[u], local_index[v]);
    int b = std::max(local_index[u], local_index[v]);
    edge_sets[node_graph[u]].emplace(a, b);
  }
  for (std::size_t g = 0; g < num_graphs; ++g)
    ds.graphs[g].edges.assign(edge_sets[g].begin(), edge_sets[g].end());

  ds.validate();
  return ds;
}

void write_tu_dataset(const GraphDataset& ds, const std::filesystem::path& out_root) {
  std::filesystem::path dir = out_root / ds.name;
  std::filesystem::create_directories(dir);
  std::ofstream a(dir / (ds.name + "_A.txt"), std::ios::binary);
  std::ofstream ind(dir / (ds.name + "_graph_indicator.txt"), std::ios::binary);
  std::ofstream lab(dir / (ds.name + "_graph_labels.txt"), std::ios::binary);
  if (!a || !ind || !lab) throw IngestionError("cannot write dataset files in " + dir.string());
  int offset = 0;
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const Graph& gr = ds.graphs[g];
    for (int i = 0; i < gr.node_count; ++i) ind << (g + 1) << "\n";
    lab << gr.label << "\n";
    std::vector<std::pair<int, int>> rows;
    for (const auto& [u, v] : gr.edges) {
      rows.emplace_back(u + offset + 1, v + offset + 1);
      rows.emplace_back(v + offset + 1, u + offset + 1);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [u, v] : rows) a << u << ", " << v << "\n";
    offset += gr.node_count;
  }
}

}  // namespace protograph
