#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "protograph/ba2motifs.hpp"
#include "protograph/errors.hpp"
#include "protograph/tu_io.hpp"

using namespace protograph;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "protograph_tu_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  os << content;
}

// Two triangles plus node labels; graph labels use the raw values {-1, 1}.
fs::path write_two_triangles() {
  fs::path root = fresh_dir("two_triangles");
  fs::path dir = root / "TWOTRI";
  fs::create_directories(dir);
  write_file(dir / "TWOTRI_A.txt",
             "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n"
             "4, 5\n5, 4\n5, 6\n6, 5\n4, 6\n6, 4\n");
  write_file(dir / "TWOTRI_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n");
  write_file(dir / "TWOTRI_graph_labels.txt", "1\n-1\n");
  write_file(dir / "TWOTRI_node_labels.txt", "0\n2\n0\n2\n2\n0\n");
  return root;
}

}  // namespace

TEST_CASE("smallest valid file set parses to a single 2-node graph") {
  fs::path root = fresh_dir("tiny");
  fs::path dir = root / "TINY";
  fs::create_directories(dir);
  write_file(dir / "TINY_A.txt", "1, 2\n");
  write_file(dir / "TINY_graph_indicator.txt", "1\n1\n");
  write_file(dir / "TINY_graph_labels.txt", "1\n");
  GraphDataset ds = parse_tu_dataset(root, "TINY");
  REQUIRE(ds.graphs.size() == 1);
  CHECK(ds.graphs[0].node_count == 2);
  CHECK(ds.graphs[0].edges == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(ds.graphs[0].label == 0);
  CHECK(ds.feature_dim == 1);  // constant feature without node labels
  CHECK(ds.graphs[0].node_features == Eigen::MatrixXd::Ones(2, 1));
}

TEST_CASE("node labels one-hot over sorted distinct values; graph labels remapped") {
  GraphDataset ds = parse_tu_dataset(write_two_triangles(), "TWOTRI");
  REQUIRE(ds.graphs.size() == 2);
  CHECK(ds.num_classes == 2);
  // raw {-1, 1} -> sorted remap {-1: 0, 1: 1}
  CHECK(ds.graphs[0].label == 1);
  CHECK(ds.graphs[1].label == 0);
  CHECK(ds.feature_dim == 2);  // values {0, 2}
  Eigen::MatrixXd f0(3, 2);
  f0 << 1, 0, 0, 1, 1, 0;  // labels 0, 2, 0
  CHECK(ds.graphs[0].node_features == f0);
  // each one-hot row sums to 1
  for (const Graph& g : ds.graphs)
    CHECK(g.node_features.rowwise().sum().isApproxToConstant(1.0, 0.0));
  // reciprocal rows collapsed to one undirected edge each
  CHECK(ds.graphs[0].edges.size() == 3);
  CHECK(ds.graphs[1].edges.size() == 3);
}

TEST_CASE("missing mandatory file names the file") {
  fs::path root = fresh_dir("missing");
  fs::create_directories(root / "GONE");
  write_file(root / "GONE" / "GONE_A.txt", "");
  write_file(root / "GONE" / "GONE_graph_labels.txt", "0\n1\n");
  CHECK_THROWS_WITH_AS(parse_tu_dataset(root, "GONE"),
                       doctest::Contains("GONE_graph_indicator.txt"), IngestionError);
}

TEST_CASE("edge crossing graphs is a format error with its line number") {
  fs::path root = fresh_dir("crossing");
  fs::path dir = root / "X";
  fs::create_directories(dir);
  write_file(dir / "X_A.txt", "1, 2\n2, 3\n");
  write_file(dir / "X_graph_indicator.txt", "1\n1\n2\n");
  write_file(dir / "X_graph_labels.txt", "0\n1\n");
  CHECK_THROWS_WITH_AS(parse_tu_dataset(root, "X"), doctest::Contains(":2"), FormatError);
}

TEST_CASE("self-loops are dropped") {
  fs::path root = fresh_dir("selfloop");
  fs::path dir = root / "S";
  fs::create_directories(dir);
  write_file(dir / "S_A.txt", "1, 1\n1, 2\n");
  write_file(dir / "S_graph_indicator.txt", "1\n1\n2\n");
  write_file(dir / "S_graph_labels.txt", "0\n1\n");
  GraphDataset ds = parse_tu_dataset(root, "S");
  CHECK(ds.graphs[0].edges == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("malformed edge row reports the offending text") {
  fs::path root = fresh_dir("badint");
  fs::path dir = root / "B";
  fs::create_directories(dir);
  write_file(dir / "B_A.txt", "1, two\n");
  write_file(dir / "B_graph_indicator.txt", "1\n1\n2\n");
  write_file(dir / "B_graph_labels.txt", "0\n1\n");
  CHECK_THROWS_AS(parse_tu_dataset(root, "B"), FormatError);
}

TEST_CASE("generated dataset round-trips through the TU format") {
  GraphDataset ds = generate_ba2motifs(10, 77);
  fs::path root = fresh_dir("roundtrip");
  write_tu_dataset(ds, root);
  GraphDataset back = parse_tu_dataset(root, "ba2motifs");
  REQUIRE(back.graphs.size() == ds.graphs.size());
  CHECK(back.num_classes == 2);
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    CHECK(back.graphs[i].node_count == ds.graphs[i].node_count);
    CHECK(back.graphs[i].label == ds.graphs[i].label);
    std::set<std::pair<int, int>> a(ds.graphs[i].edges.begin(), ds.graphs[i].edges.end());
    std::set<std::pair<int, int>> b(back.graphs[i].edges.begin(), back.graphs[i].edges.end());
    CHECK(a == b);  // exact edge-set equality (node order is preserved by both sides)
  }
  // the writer has no node-label channel, so features come back constant
  CHECK(back.feature_dim == 1);
}

TEST_CASE("writer emits 1-indexed comma-space rows in both directions") {
  GraphDataset ds;
  ds.name = "W";
  ds.num_classes = 2;
  ds.feature_dim = 1;
  Graph g;
  g.node_count = 2;
  g.edges = {{0, 1}};
  g.node_features = Eigen::MatrixXd::Ones(2, 1);
  g.label = 0;
  ds.graphs.push_back(g);
  g.label = 1;
  ds.graphs.push_back(g);
  fs::path root = fresh_dir("writer");
  write_tu_dataset(ds, root);
  std::ifstream a(root / "W" / "W_A.txt", std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  CHECK(content == "1, 2\n2, 1\n3, 4\n4, 3\n");
}
