#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "protograph/ba2motifs.hpp"
#include "protograph/errors.hpp"
#include "protograph/metrics.hpp"
#include "protograph/trainer.hpp"

using namespace protograph;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path tmp_file(const std::string& leaf) {
  fs::path dir = fs::temp_directory_path() / "protograph_metrics_test";
  fs::create_directories(dir);
  return dir / leaf;
}

// Pairwise-comparison transcription of the ROC area.
double auc_oracle(const std::vector<double>& scores, const std::vector<int>& truth) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (truth[p] == 0) continue;
    for (std::size_t q = 0; q < scores.size(); ++q) {
      if (truth[q] != 0) continue;
      ++pairs;
      if (scores[p] > scores[q])
        wins += 1.0;
      else if (scores[p] == scores[q])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// Indicator-difference transcription of the fidelity pair, built only from
// predict / induced_subgraph / an independent top-k sort.
FidelityRow fidelity_oracle(const ModelState& state, const std::vector<Graph>& graphs,
                            const std::vector<int>& indices, double k) {
  int sminus = 0, splus = 0;
  for (int gi : indices) {
    const Graph& g = graphs[gi];
    Prediction full = predict(g, state);
    int cf = full.predicted_class == g.label;

    std::vector<int> order(g.node_count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return full.node_p(a) > full.node_p(b); });
    int keep = static_cast<int>(std::ceil(k * g.node_count));
    std::vector<int> top(order.begin(), order.begin() + keep);
    std::sort(top.begin(), top.end());
    std::vector<int> rest;
    for (int n = 0; n < g.node_count; ++n)
      if (std::find(top.begin(), top.end(), n) == top.end()) rest.push_back(n);

    int ct = predict(g.induced_subgraph(top), state).predicted_class == g.label;
    int cr = rest.empty()
                 ? 0
                 : predict(g.induced_subgraph(rest), state).predicted_class == g.label;
    sminus += cf - ct;
    splus += cf - cr;
  }
  FidelityRow row;
  row.k = k;
  row.n = static_cast<int>(indices.size());
  row.f_minus = static_cast<double>(sminus) / row.n;
  row.f_plus = static_cast<double>(splus) / row.n;
  return row;
}

ModelState tiny_model(std::uint64_t seed) {
  PgibConfig cfg;
  cfg.gin.layers = 2;
  cfg.gin.hidden_dim = 8;
  cfg.per_class = 2;
  cfg.seed = seed;
  return init_model(10, 2, cfg);  // matches the synthetic feature width
}

}  // namespace

TEST_CASE("roc auc pins") {
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}) == 0.0);
  CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == 0.5);
  // Midranks: scores (0.1, 0.4, 0.4, 0.8) -> ranks (1, 2.5, 2.5, 4).
  CHECK(roc_auc({0.1, 0.4, 0.4, 0.8}, {0, 0, 1, 1}) == doctest::Approx(0.875).epsilon(1e-14));
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), ArgumentError);
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1}), ArgumentError);
}

TEST_CASE("roc auc complement identity and pairwise oracle") {
  RngStream rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 4 + static_cast<int>(rng.uniform_below(20));
    std::vector<double> scores(n);
    std::vector<int> truth(n), flipped(n);
    bool both = false;
    for (int i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.uniform_below(6));  // integer grid forces ties
      truth[i] = rng.uniform() < 0.5 ? 1 : 0;
      flipped[i] = 1 - truth[i];
    }
    truth[0] = 1;
    truth[1] = 0;
    flipped[0] = 0;
    flipped[1] = 1;
    both = true;
    REQUIRE(both);
    double a = roc_auc(scores, truth);
    CHECK(a == doctest::Approx(auc_oracle(scores, truth)).epsilon(1e-12));
    CHECK(a + roc_auc(scores, flipped) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fidelity: keeping every node zeroes the drop and empties the complement") {
  GraphDataset ds = generate_ba2motifs(12, 5);
  std::vector<int> idx{0, 1, 2, 3, 4, 5};
  ModelState state = tiny_model(2);

  // ceil(0.99 n) = n: the kept subgraph is the whole graph.
  FidelityRow row = fidelity_scores(state, ds.graphs, idx, 0.99);
  CHECK(row.f_minus == 0.0);
  CHECK(row.n == 6);
  // Empty complements count as wrong, so F+ equals the full-graph accuracy.
  CHECK(row.f_plus == accuracy(state, ds.graphs, idx));
}

TEST_CASE("fidelity matches the indicator oracle on random fixtures") {
  GraphDataset ds = generate_ba2motifs(16, 9);
  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ModelState state = tiny_model(100 + trial);
    std::vector<int> idx;
    for (int i = 0; i < 16; ++i)
      if (rng.uniform() < 0.4) idx.push_back(i);
    if (idx.empty()) idx.push_back(static_cast<int>(rng.uniform_below(16)));
    double k = 0.1 + 0.8 * rng.uniform();

    FidelityRow got = fidelity_scores(state, ds.graphs, idx, k);
    FidelityRow expect = fidelity_oracle(state, ds.graphs, idx, k);
    CHECK(got.f_minus == expect.f_minus);
    CHECK(got.f_plus == expect.f_plus);
    CHECK(got.n == expect.n);
    CHECK(got.f_minus >= -1.0);
    CHECK(got.f_minus <= 1.0);
    CHECK(got.f_plus >= -1.0);
    CHECK(got.f_plus <= 1.0);
  }
}

TEST_CASE("fidelity input validation") {
  GraphDataset ds = generate_ba2motifs(10, 1);
  ModelState state = tiny_model(4);
  CHECK_THROWS_AS(fidelity_scores(state, ds.graphs, {0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(fidelity_scores(state, ds.graphs, {0}, 1.0), ArgumentError);
  CHECK_THROWS_AS(fidelity_scores(state, ds.graphs, {}, 0.5), ArgumentError);
}

TEST_CASE("sparsity sweep sorts its ratios and reproduces single calls") {
  GraphDataset ds = generate_ba2motifs(10, 7);
  ModelState state = tiny_model(6);
  std::vector<int> idx{0, 1, 2, 3};
  FidelityReport rep = sparsity_sweep(state, ds.graphs, idx, {0.5, 0.1, 0.3});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].k == 0.1);
  CHECK(rep.rows[1].k == 0.3);
  CHECK(rep.rows[2].k == 0.5);
  for (const FidelityRow& r : rep.rows) {
    FidelityRow single = fidelity_scores(state, ds.graphs, idx, r.k);
    CHECK(r.f_minus == single.f_minus);
    CHECK(r.f_plus == single.f_plus);
  }
}

TEST_CASE("fidelity csv golden") {
  FidelityReport rep;
  rep.rows.push_back({0.1, 0.5, -0.25, 4});
  rep.rows.push_back({0.3, 0.0, 1.0, 4});
  fs::path p = tmp_file("fidelity_golden.csv");
  write_fidelity_csv(rep, p);
  CHECK(slurp(p) == "k,f_minus,f_plus,n\n0.1,0.5,-0.25,4\n0.3,0,1,4\n");
}

TEST_CASE("line plot svg structure") {
  fs::path p = tmp_file("plot.svg");
  write_line_plot_svg(p, "fidelity sweep",
                      {{"F-", {{0.1, 0.0}, {0.5, 0.2}, {0.9, 0.6}}},
                       {"F+", {{0.1, 0.7}, {0.5, 0.5}, {0.9, 0.1}}}});
  std::string svg = slurp(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("fidelity sweep") != std::string::npos);
  CHECK(svg.find(">F-<") != std::string::npos);
  CHECK(svg.find(">F+<") != std::string::npos);
  std::size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    pos += 9;
  }
  CHECK(polylines == 2);

  // Degenerate input still produces a well-formed file.
  fs::path p2 = tmp_file("plot_empty.svg");
  write_line_plot_svg(p2, "empty", {});
  std::string svg2 = slurp(p2);
  CHECK(svg2.rfind("<svg", 0) == 0);
  CHECK(svg2.find("</svg>") != std::string::npos);
}
