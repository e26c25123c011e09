#include "protograph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "protograph/bottleneck.hpp"
#include "protograph/errors.hpp"

namespace protograph {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

FidelityRow fidelity_scores(const ModelState& state, const std::vector<Graph>& graphs,
                            const std::vector<int>& indices, double k) {
  if (k <= 0.0 || k >= 1.0) throw ArgumentError("fidelity_scores: k must be in (0,1)");
  if (indices.empty()) throw ArgumentError("fidelity_scores: empty index list");
  int sum_minus = 0, sum_plus = 0;
  for (int gi : indices) {
    const Graph& g = graphs[gi];
    Prediction full = predict(g, state);
    int correct_full = full.predicted_class == g.label ? 1 : 0;

    std::vector<int> top = select_topk_nodes(full.node_p, k);
    int correct_top = 0;
    if (!top.empty()) {
      Prediction sub = predict(g.induced_subgraph(top), state);
      correct_top = sub.predicted_class == g.label ? 1 : 0;
    }

    std::vector<int> rest;
    std::vector<char> in_top(g.node_count, 0);
    for (int n : top) in_top[n] = 1;
    for (int n = 0; n < g.node_count; ++n)
      if (!in_top[n]) rest.push_back(n);
    int correct_rest = 0;  // empty complement counts as misclassified
    if (!rest.empty()) {
      Prediction comp = predict(g.induced_subgraph(rest), state);
      correct_rest = comp.predicted_class == g.label ? 1 : 0;
    }

    sum_minus += correct_full - correct_top;
    sum_plus += correct_full - correct_rest;
  }
  FidelityRow row;
  row.k = k;
  row.n = static_cast<int>(indices.size());
  row.f_minus = static_cast<double>(sum_minus) / row.n;
  row.f_plus = static_cast<double>(sum_plus) / row.n;
  return row;
}

FidelityReport sparsity_sweep(const ModelState& state, const std::vector<Graph>& graphs,
                              const std::vector<int>& indices, std::vector<double> ks) {
  std::sort(ks.begin(), ks.end());
  FidelityReport rep;
  for (double k : ks) rep.rows.push_back(fidelity_scores(state, graphs, indices, k));
  return rep;
}

void write_fidelity_csv(const FidelityReport& report, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestionError("cannot write " + path.string());
  os << "k,f_minus,f_plus,n\n";
  for (const FidelityRow& r : report.rows)
    os << fmt(r.k) << "," << fmt(r.f_minus) << "," << fmt(r.f_plus) << "," << r.n << "\n";
}

void write_line_plot_svg(
    const std::filesystem::path& path, const std::string& title,
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
  const double W = 640, H = 420, ML = 60, MR = 20, MT = 40, MB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [name, pts] : series)
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymax = ymin + 0.5;
    ymin -= 0.5;
  }
  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestionError("cannot write " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
  // axes
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
     << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double xv = xmin + (xmax - xmin) * t / 4.0;
    double yv = ymin + (ymax - ymin) * t / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - MB + 18
       << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    os << "<text x=\"" << ML - 8 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  int ci = 0;
  for (const auto& [name, pts] : series) {
    const char* color = colors[ci % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) os << px(x) << "," << py(y) << " ";
    os << "\"/>\n";
    for (const auto& [x, y] : pts)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    os << "<text x=\"" << W - MR - 5 << "\" y=\"" << MT + 16 * (ci + 1)
       << "\" text-anchor=\"end\" fill=\"" << color << "\">" << name << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size()) throw ArgumentError("roc_auc: length mismatch");
  long n_pos = 0, n_neg = 0;
  for (int t : truth) (t != 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw ArgumentError("roc_auc: need both positive and negative examples");
  // Rank-sum with midranks for ties.
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> rank(scores.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = mid;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (truth[t] != 0) pos_rank_sum += rank[t];
  return (pos_rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace protograph
