#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "protograph/model.hpp"

namespace protograph {

struct FidelityRow {
  double k = 0.0;
  double f_minus = 0.0;
  double f_plus = 0.0;
  int n = 0;
};

struct FidelityReport {
  std::vector<FidelityRow> rows;  // sorted by k
  std::string dataset;
  std::string run;
};

// F- = mean[ I(y = y_full) - I(y = y_topk) ],
// F+ = mean[ I(y = y_full) - I(y = y_complement) ]; predictions are run on
// node-induced subgraphs with original features. An empty complement counts
// as misclassified.
FidelityRow fidelity_scores(const ModelState& state, const std::vector<Graph>& graphs,
                            const std::vector<int>& indices, double k);

FidelityReport sparsity_sweep(const ModelState& state, const std::vector<Graph>& graphs,
                              const std::vector<int>& indices, std::vector<double> ks);

void write_fidelity_csv(const FidelityReport& report, const std::filesystem::path& path);

// Line plot of (k, value) series as a standalone SVG.
void write_line_plot_svg(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);

// Area under the ROC curve of scores against binary truth (1 = positive);
// ties handled by the rank formula (equivalent to trapezoidal integration).
double roc_auc(const std::vector<double>& scores, const std::vector<int>& truth);

}  // namespace protograph
