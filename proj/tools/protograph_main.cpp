// Command-line front end: train / eval / explain / sweep / fidelity.
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "protograph/ba2motifs.hpp"
#include "protograph/errors.hpp"
#include "protograph/metrics.hpp"
#include "protograph/model.hpp"
#include "protograph/report.hpp"
#include "protograph/trainer.hpp"
#include "protograph/tu_io.hpp"

namespace {

using namespace protograph;

namespace fs = std::filesystem;

fs::path data_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("PROTOGRAPH_DATA")) return env;
  return "./data";
}

GraphDataset load_dataset(const std::string& name, const fs::path& root,
                          std::uint64_t seed) {
  if (name == "ba2motifs") return generate_ba2motifs(1000, seed);
  std::string upper = name;
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "MUTAG" || upper == "PROTEINS" || upper == "NCI1" || upper == "DD") {
    if (!fs::exists(root / upper))
      throw IngestionError("dataset directory not found: " + (root / upper).string() +
                           " (set --data-root or PROTOGRAPH_DATA)");
    return parse_tu_dataset(root, upper);
  }
  throw CLI::ValidationError("--dataset", "unknown dataset: " + name);
}

// Key-value config overrides from a text file ("key = value" per line, same
// keys as the emitted config snapshot).
void apply_config_file(PgibConfig& cfg, const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IngestionError("cannot read config file: " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "alpha1") cfg.alpha1 = std::stod(val);
    else if (key == "alpha2") cfg.alpha2 = std::stod(val);
    else if (key == "alpha3") cfg.alpha3 = std::stod(val);
    else if (key == "batch_size") cfg.batch_size = std::stoi(val);
    else if (key == "epochs") cfg.epochs = std::stoi(val);
    else if (key == "gin.epsilon") cfg.gin.epsilon_gin = std::stod(val);
    else if (key == "gin.hidden_dim") cfg.gin.hidden_dim = std::stoi(val);
    else if (key == "gin.layers") cfg.gin.layers = std::stoi(val);
    else if (key == "gin.readout") cfg.gin.readout_mode = readout_from_string(val);
    else if (key == "lr") cfg.lr = std::stod(val);
    else if (key == "mcts.exploration_c") cfg.mcts.exploration_c = std::stod(val);
    else if (key == "mcts.expansion_width") cfg.mcts.expansion_width = std::stoi(val);
    else if (key == "mcts.iterations") cfg.mcts.iterations = std::stoi(val);
    else if (key == "mcts.min_nodes") cfg.mcts.min_nodes = std::stoi(val);
    else if (key == "mcts.rollout_limit") cfg.mcts.rollout_limit = std::stoi(val);
    else if (key == "merge_enabled") cfg.merge_enabled = (val == "true" || val == "1");
    else if (key == "merge_period") cfg.merge_period = std::stoi(val);
    else if (key == "merge_start") cfg.merge_start = std::stoi(val);
    else if (key == "mi_mode") cfg.mi_mode = mi_mode_from_string(val);
    else if (key == "per_class") cfg.per_class = std::stoi(val);
    else if (key == "tau") cfg.tau = std::stod(val);
    else if (key == "temperature") cfg.temperature = std::stod(val);
    else if (key == "xi") cfg.xi = std::stod(val);
    else if (key == "seed" || key == "dataset") { /* taken from flags */ }
    else throw FormatError(path.string() + ":" + std::to_string(lineno) +
                           ": unknown config key '" + key + "'");
  }
}

std::string run_dataset_name(const fs::path& run) {
  std::ifstream is(run / "config.txt");
  if (!is) throw IngestionError("run directory has no config.txt: " + run.string());
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("dataset = ", 0) == 0) return line.substr(10);
  }
  throw FormatError("config.txt in " + run.string() + " lacks a dataset entry");
}

std::vector<ProjectionResult> load_projections(const fs::path& run) {
  std::vector<ProjectionResult> out;
  std::ifstream is(run / "projections.csv");
  if (!is) return out;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string proto, src, dist, nodes;
    std::getline(ss, proto, ',');
    std::getline(ss, src, ',');
    std::getline(ss, dist, ',');
    std::getline(ss, nodes);
    ProjectionResult pr;
    pr.prototype = std::stoi(proto);
    pr.source_graph = std::stoi(src);
    pr.distance = std::stod(dist);
    std::stringstream ns(nodes);
    std::string tok;
    while (std::getline(ns, tok, ';'))
      if (!tok.empty()) pr.nodes.push_back(std::stoi(tok));
    out.push_back(std::move(pr));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw ArgumentError("empty value list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prototype-bottleneck graph classifier"};
  app.require_subcommand(1);

  std::string dataset, config_file, out = "runs/out", run, graph_id_s, param, values_s;
  std::string data_flag, ks_s = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", split_name = "test";
  std::uint64_t seed = 0;
  std::string seeds_s = "0,1,2";

  CLI::App* tr = app.add_subcommand("train", "train a model and write a run directory");
  tr->add_option("--dataset", dataset, "mutag|proteins|nci1|dd|ba2motifs")->required();
  tr->add_option("--config", config_file, "key-value override file");
  tr->add_option("--seed", seed, "rng seed");
  tr->add_option("--out", out, "run directory");
  tr->add_option("--data-root", data_flag, "TU dataset root (or PROTOGRAPH_DATA)");

  CLI::App* ev = app.add_subcommand("eval", "accuracy of a trained run on a split");
  ev->add_option("--run", run, "run directory")->required();
  ev->add_option("--split", split_name, "train|val|test");
  ev->add_option("--data-root", data_flag, "TU dataset root");

  CLI::App* ex = app.add_subcommand("explain", "reasoning report for one graph");
  ex->add_option("--run", run, "run directory")->required();
  ex->add_option("--graph-id", graph_id_s, "dataset graph index")->required();
  ex->add_option("--out", out, "output directory");
  ex->add_option("--data-root", data_flag, "TU dataset root");

  CLI::App* sw = app.add_subcommand("sweep", "hyperparameter sensitivity data");
  sw->add_option("--dataset", dataset, "dataset name")->required();
  sw->add_option("--param", param, "alpha1|alpha2|alpha3|J")->required();
  sw->add_option("--values", values_s, "comma-separated values")->required();
  sw->add_option("--seeds", seeds_s, "comma-separated seeds");
  sw->add_option("--config", config_file, "key-value override file");
  sw->add_option("--out", out, "output directory");
  sw->add_option("--data-root", data_flag, "TU dataset root");

  CLI::App* fi = app.add_subcommand("fidelity", "fidelity across sparsity levels");
  fi->add_option("--run", run, "run directory")->required();
  fi->add_option("--ks", ks_s, "comma-separated sparsity levels in (0,1)");
  fi->add_option("--split", split_name, "train|val|test");
  fi->add_option("--data-root", data_flag, "TU dataset root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // CLI11 prints usage; exit code 1 on errors, 0 for --help
  }

  try {
    if (tr->parsed()) {
      GraphDataset ds = load_dataset(dataset, data_root(data_flag), seed);
      PgibConfig cfg;
      if (!config_file.empty()) apply_config_file(cfg, config_file);
      cfg.seed = seed;
      SplitSpec split = split_dataset(ds, seed);
      TrainState st = train(ds, split, cfg, fs::path(out));
      double test_acc = accuracy(st.best_model, ds.graphs, split.test);
      std::cout << "best_epoch=" << st.best_epoch << " val_accuracy=" << st.best_val_accuracy
                << " test_accuracy=" << test_acc << "\n";
      return 0;
    }

    auto split_of = [&](const GraphDataset& ds, const ModelState& ms) {
      SplitSpec s = split_dataset(ds, ms.cfg.seed);
      if (split_name == "train") return s.train;
      if (split_name == "val") return s.val;
      if (split_name == "test") return s.test;
      throw ArgumentError("unknown split: " + split_name);
    };

    if (ev->parsed()) {
      ModelState ms = load_model(fs::path(run) / "best.ckpt");
      GraphDataset ds = load_dataset(run_dataset_name(run), data_root(data_flag), ms.cfg.seed);
      double acc = accuracy(ms, ds.graphs, split_of(ds, ms));
      std::cout << "split=" << split_name << " accuracy=" << acc << "\n";
      return 0;
    }

    if (ex->parsed()) {
      ModelState ms = load_model(fs::path(run) / "best.ckpt");
      GraphDataset ds = load_dataset(run_dataset_name(run), data_root(data_flag), ms.cfg.seed);
      int gid = 0;
      try {
        std::size_t used = 0;
        gid = std::stoi(graph_id_s, &used);
        if (used != graph_id_s.size()) throw std::invalid_argument(graph_id_s);
      } catch (const std::exception&) {
        throw ArgumentError("--graph-id expects a dataset index, got '" + graph_id_s + "'");
      }
      if (gid < 0 || gid >= static_cast<int>(ds.graphs.size()))
        throw ArgumentError("graph id out of range: " + graph_id_s);
      emit_reasoning_report(ms, ds.graphs[gid], load_projections(run), ds.graphs,
                            fs::path(out));
      std::cout << "report written to " << out << "\n";
      return 0;
    }

    if (sw->parsed()) {
      GraphDataset ds = load_dataset(dataset, data_root(data_flag), 0);
      std::vector<double> values = parse_double_list(values_s);
      std::vector<double> seeds = parse_double_list(seeds_s);
      fs::create_directories(out);
      std::ofstream csv(fs::path(out) / ("sweep_" + param + ".csv"), std::ios::binary);
      csv << "value,seed,test_accuracy\n";
      std::vector<std::pair<double, double>> mean_curve;
      for (double v : values) {
        double acc_sum = 0.0;
        for (double sd : seeds) {
          PgibConfig cfg;
          if (!config_file.empty()) apply_config_file(cfg, config_file);
          if (param == "alpha1") cfg.alpha1 = v;
          else if (param == "alpha2") cfg.alpha2 = v;
          else if (param == "alpha3") cfg.alpha3 = v;
          else if (param == "J") cfg.per_class = static_cast<int>(v);
          else throw ArgumentError("unknown sweep parameter: " + param);
          cfg.seed = static_cast<std::uint64_t>(sd);
          SplitSpec split = split_dataset(ds, cfg.seed);
          TrainState st = train(ds, split, cfg, std::nullopt);
          double acc = accuracy(st.best_model, ds.graphs, split.test);
          csv << v << "," << sd << "," << acc << "\n";
          acc_sum += acc;
        }
        mean_curve.emplace_back(v, acc_sum / static_cast<double>(seeds.size()));
      }
      write_line_plot_svg(fs::path(out) / ("sweep_" + param + ".svg"),
                          "test accuracy vs " + param, {{param, mean_curve}});
      std::cout << "sweep written to " << out << "\n";
      return 0;
    }

    if (fi->parsed()) {
      ModelState ms = load_model(fs::path(run) / "best.ckpt");
      GraphDataset ds = load_dataset(run_dataset_name(run), data_root(data_flag), ms.cfg.seed);
      FidelityReport rep =
          sparsity_sweep(ms, ds.graphs, split_of(ds, ms), parse_double_list(ks_s));
      write_fidelity_csv(rep, fs::path(run) / "fidelity.csv");
      std::vector<std::pair<double, double>> fm, fp;
      for (const FidelityRow& r : rep.rows) {
        fm.emplace_back(r.k, r.f_minus);
        fp.emplace_back(r.k, r.f_plus);
      }
      write_line_plot_svg(fs::path(run) / "fidelity.svg", "fidelity vs sparsity",
                          {{"F-", fm}, {"F+", fp}});
      std::cout << "fidelity written to " << (fs::path(run) / "fidelity.csv").string() << "\n";
      return 0;
    }
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
