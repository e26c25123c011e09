#include "protograph/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "protograph/checkpoint.hpp"
#include "protograph/errors.hpp"

namespace protograph {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

// Infer-mode evaluation, one graph per batch so results are independent of
// evaluation batching. Returns accuracy and per-graph-averaged losses.
EpochMetrics evaluate_split(const ModelState& state, const GraphDataset& ds,
                            const std::vector<int>& indices, int epoch,
                            const std::string& split_name) {
  EpochMetrics em;
  em.epoch = epoch;
  em.split = split_name;
  if (indices.empty()) return em;
  int correct = 0;
  LossBreakdown sum;
  RngStream unused(0);
  for (int gi : indices) {
    Batch b = batch_graphs(ds.graphs, {gi});
    Tape tape;
    TapeBinding bind(tape, state.params, /*trainable=*/false);
    ForwardResult fr = forward_pass(b, state, bind, unused, GateMode::Infer);
    long arg = 0;
    fr.pi.value().row(0).maxCoeff(&arg);
    if (static_cast<int>(arg) == ds.graphs[gi].label) ++correct;
    sum.l_cls += fr.breakdown.l_cls;
    sum.l_mi1 += fr.breakdown.l_mi1;
    sum.l_mi2 += fr.breakdown.l_mi2;
    sum.l_con += fr.breakdown.l_con;
  }
  double n = static_cast<double>(indices.size());
  em.accuracy = correct / n;
  em.losses.l_cls = sum.l_cls / n;
  em.losses.l_mi1 = sum.l_mi1 / n;
  em.losses.l_mi2 = sum.l_mi2 / n;
  em.losses.l_con = sum.l_con / n;
  em.losses.total = total_of(em.losses, state.cfg);
  return em;
}

void write_metrics_row(std::ostream& os, const EpochMetrics& em) {
  os << em.epoch << "," << em.split << "," << fmt(em.accuracy) << "," << fmt(em.losses.l_cls)
     << "," << fmt(em.losses.l_mi1) << "," << fmt(em.losses.l_mi2) << ","
     << fmt(em.losses.l_con) << "\n";
}

}  // namespace

std::string config_text(const PgibConfig& cfg, const std::string& dataset_name) {
  std::map<std::string, std::string> kv;
  kv["alpha1"] = fmt(cfg.alpha1);
  kv["alpha2"] = fmt(cfg.alpha2);
  kv["alpha3"] = fmt(cfg.alpha3);
  kv["batch_size"] = std::to_string(cfg.batch_size);
  kv["dataset"] = dataset_name;
  kv["epochs"] = std::to_string(cfg.epochs);
  kv["gin.epsilon"] = fmt(cfg.gin.epsilon_gin);
  kv["gin.hidden_dim"] = std::to_string(cfg.gin.hidden_dim);
  kv["gin.layers"] = std::to_string(cfg.gin.layers);
  kv["gin.readout"] = readout_to_string(cfg.gin.readout_mode);
  kv["lr"] = fmt(cfg.lr);
  kv["mcts.exploration_c"] = fmt(cfg.mcts.exploration_c);
  kv["mcts.expansion_width"] = std::to_string(cfg.mcts.expansion_width);
  kv["mcts.iterations"] = std::to_string(cfg.mcts.iterations);
  kv["mcts.min_nodes"] = std::to_string(cfg.mcts.min_nodes);
  kv["mcts.rollout_limit"] = std::to_string(cfg.mcts.rollout_limit);
  kv["merge_enabled"] = cfg.merge_enabled ? "true" : "false";
  kv["merge_period"] = std::to_string(cfg.merge_period);
  kv["merge_start"] = std::to_string(cfg.merge_start);
  kv["mi_mode"] = mi_mode_to_string(cfg.mi_mode);
  kv["per_class"] = std::to_string(cfg.per_class);
  kv["seed"] = std::to_string(cfg.seed);
  kv["tau"] = fmt(cfg.tau);
  kv["temperature"] = fmt(cfg.temperature);
  kv["xi"] = fmt(cfg.xi);
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  return os.str();
}

TrainState train(const GraphDataset& ds, const SplitSpec& split, const PgibConfig& cfg,
                 const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  ds.validate();
  if (split.train.empty() || split.val.empty())
    throw ArgumentError("train: split needs non-empty train and val parts");

  TrainState st;
  st.model = init_model(ds.feature_dim, ds.num_classes, cfg);
  AdamOptimizer opt(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
  RngStream root(cfg.seed);

  std::ofstream metrics_os, events_os;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream cfg_os(*out_dir / "config.txt", std::ios::binary);
    cfg_os << config_text(cfg, ds.name);
    metrics_os.open(*out_dir / "metrics.csv", std::ios::binary);
    metrics_os << "epoch,split,accuracy,l_cls,l_mi1,l_mi2,l_con\n";
    events_os.open(*out_dir / "events.log", std::ios::binary);
  }

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Minibatch passes.
    std::vector<int> order = split.train;
    RngStream shuffle_rng = root.fork(0x10000ULL + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    LossBreakdown train_sum;
    int train_correct = 0;
    int batch_count = 0;
    for (std::size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
      std::size_t end = std::min(order.size(), pos + static_cast<std::size_t>(cfg.batch_size));
      std::vector<int> idx(order.begin() + static_cast<long>(pos),
                           order.begin() + static_cast<long>(end));
      Batch batch = batch_graphs(ds.graphs, idx);
      Tape tape;
      TapeBinding bind(tape, st.model.params, /*trainable=*/true);
      RngStream draw_rng = root.fork(0x20000000ULL + static_cast<std::uint64_t>(epoch) * 100000ULL +
                                     static_cast<std::uint64_t>(batch_count));
      ForwardResult fr = forward_pass(batch, st.model, bind, draw_rng, GateMode::Train);
      if (!std::isfinite(fr.breakdown.total))
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_count));
      tape.backward(fr.loss);
      opt.step(st.model.params, bind.grads());

      const Eigen::MatrixXd& pi = fr.pi.value();
      for (long i = 0; i < pi.rows(); ++i) {
        long arg = 0;
        pi.row(i).maxCoeff(&arg);
        if (static_cast<int>(arg) == batch.labels[i]) ++train_correct;
      }
      train_sum.l_cls += fr.breakdown.l_cls;
      train_sum.l_mi1 += fr.breakdown.l_mi1;
      train_sum.l_mi2 += fr.breakdown.l_mi2;
      train_sum.l_con += fr.breakdown.l_con;
      ++batch_count;
    }

    // Interpretability-stabilization events: projection, then merging.
    bool event_epoch = cfg.merge_enabled && epoch >= cfg.merge_start &&
                       epoch % cfg.merge_period == 0;
    if (event_epoch) {
      std::vector<Graph> train_graphs;
      train_graphs.reserve(split.train.size());
      for (int gi : split.train) train_graphs.push_back(ds.graphs[gi]);

      RngStream proj_rng = root.fork(0x30000000ULL + static_cast<std::uint64_t>(epoch));
      st.projections = project_prototypes(st.model.protos, st.model.params, train_graphs,
                                          cfg.gin, cfg.mcts, proj_rng);
      std::vector<int> act = st.model.protos.active_indices();
      opt.reset_rows("proto.vectors", act);  // projected rows restart momentum
      if (events_os.is_open())
        for (const ProjectionResult& pr : st.projections)
          events_os << "epoch=" << epoch << " event=projection prototype=" << pr.prototype
                    << " source_graph=" << split.train[pr.source_graph]
                    << " nodes=" << join_ints(pr.nodes) << " distance=" << fmt(pr.distance)
                    << "\n";

      // Infer-mode training subgraph embeddings for behavioral similarity.
      Eigen::MatrixXd sub_embs(static_cast<long>(train_graphs.size()), cfg.gin.hidden_dim);
      for (std::size_t i = 0; i < train_graphs.size(); ++i)
        sub_embs.row(static_cast<long>(i)) = predict(train_graphs[i], st.model).z_sub;
      Eigen::MatrixXd h = prototype_pair_similarity(st.model.protos, st.model.params, sub_embs);
      std::vector<MergeEvent> merges =
          merge_prototypes(st.model.protos, st.model.params, h, cfg.xi, epoch);
      std::vector<int> removed;
      for (const MergeEvent& me : merges) removed.push_back(me.removed);
      opt.reset_rows("proto.vectors", removed);
      opt.reset_rows("proto.omega", removed);
      if (events_os.is_open())
        for (const MergeEvent& me : merges)
          events_os << "epoch=" << epoch << " event=merge kept=" << me.kept
                    << " removed=" << me.removed
                    << " pair_similarity=" << fmt(me.pair_similarity)
                    << " active_after=" << st.model.protos.active_count() << "\n";
      st.merges.insert(st.merges.end(), merges.begin(), merges.end());
    }

    // Per-epoch metrics: train from the minibatch passes, val re-evaluated.
    EpochMetrics train_em;
    train_em.epoch = epoch;
    train_em.split = "train";
    train_em.accuracy = static_cast<double>(train_correct) / split.train.size();
    train_em.losses.l_cls = train_sum.l_cls / batch_count;
    train_em.losses.l_mi1 = train_sum.l_mi1 / batch_count;
    train_em.losses.l_mi2 = train_sum.l_mi2 / batch_count;
    train_em.losses.l_con = train_sum.l_con / batch_count;
    train_em.losses.total = total_of(train_em.losses, cfg);
    EpochMetrics val_em = evaluate_split(st.model, ds, split.val, epoch, "val");
    st.history.push_back(train_em);
    st.history.push_back(val_em);
    if (metrics_os.is_open()) {
      write_metrics_row(metrics_os, train_em);
      write_metrics_row(metrics_os, val_em);
    }

    if (val_em.accuracy > st.best_val_accuracy) {
      st.best_val_accuracy = val_em.accuracy;
      st.best_epoch = epoch;
      st.best_model = st.model;
    }
  }

  if (out_dir) {
    save_model(st.best_model, *out_dir / "best.ckpt");
    save_model(st.model, *out_dir / "final.ckpt");
    // Projection provenance with dataset-level graph ids, for `explain`.
    std::ofstream proj_os(*out_dir / "projections.csv", std::ios::binary);
    proj_os << "prototype,source_graph,distance,nodes\n";
    for (const ProjectionResult& pr : st.projections) {
      std::string nodes;
      for (std::size_t i = 0; i < pr.nodes.size(); ++i) {
        if (i) nodes += ";";
        nodes += std::to_string(pr.nodes[i]);
      }
      proj_os << pr.prototype << "," << split.train[pr.source_graph] << ","
              << fmt(pr.distance) << "," << nodes << "\n";
    }
  }
  return st;
}

double accuracy(const ModelState& state, const std::vector<Graph>& graphs,
                const std::vector<int>& indices) {
  if (indices.empty()) throw ArgumentError("accuracy: empty index list");
  int correct = 0;
  for (int gi : indices)
    if (predict(graphs[gi], state).predicted_class == graphs[gi].label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

void save_model(const ModelState& state, const std::filesystem::path& path) {
  std::map<std::string, Eigen::MatrixXd> arrays = state.params.entries();
  const PrototypeSet& p = state.protos;
  Eigen::MatrixXd meta(p.total(), 2);
  for (int m = 0; m < p.total(); ++m) {
    meta(m, 0) = p.class_of[m];
    meta(m, 1) = p.active[m] ? 1.0 : 0.0;
  }
  arrays.emplace("__proto_meta", std::move(meta));

  const PgibConfig& c = state.cfg;
  Eigen::VectorXd cv(25);
  cv << p.num_classes, c.per_class, c.gin.hidden_dim, c.gin.layers, c.gin.epsilon_gin,
      static_cast<double>(static_cast<int>(c.gin.readout_mode)),
      static_cast<double>(static_cast<int>(c.mi_mode)), c.alpha1, c.alpha2, c.alpha3, c.tau,
      c.xi, c.epochs, c.merge_start, c.merge_period, c.merge_enabled ? 1.0 : 0.0, c.lr,
      c.batch_size, static_cast<double>(c.seed), c.temperature, c.mcts.iterations,
      c.mcts.min_nodes, c.mcts.expansion_width, c.mcts.exploration_c, c.mcts.rollout_limit;
  arrays.emplace("__config", Eigen::MatrixXd(cv));
  save_arrays(path, arrays);
}

ModelState load_model(const std::filesystem::path& path) {
  auto arrays = load_arrays(path);
  auto meta_it = arrays.find("__proto_meta");
  auto cfg_it = arrays.find("__config");
  if (meta_it == arrays.end() || cfg_it == arrays.end())
    throw FormatError("model checkpoint missing metadata arrays: " + path.string());

  ModelState st;
  const Eigen::MatrixXd& cv = cfg_it->second;
  if (cv.rows() < 25 || cv.cols() != 1)
    throw FormatError("model checkpoint has malformed config array");
  PgibConfig c;
  int num_classes = static_cast<int>(cv(0, 0));
  c.per_class = static_cast<int>(cv(1, 0));
  c.gin.hidden_dim = static_cast<int>(cv(2, 0));
  c.gin.layers = static_cast<int>(cv(3, 0));
  c.gin.epsilon_gin = cv(4, 0);
  c.gin.readout_mode = static_cast<ReadoutMode>(static_cast<int>(cv(5, 0)));
  c.mi_mode = static_cast<MiMode>(static_cast<int>(cv(6, 0)));
  c.alpha1 = cv(7, 0);
  c.alpha2 = cv(8, 0);
  c.alpha3 = cv(9, 0);
  c.tau = cv(10, 0);
  c.xi = cv(11, 0);
  c.epochs = static_cast<int>(cv(12, 0));
  c.merge_start = static_cast<int>(cv(13, 0));
  c.merge_period = static_cast<int>(cv(14, 0));
  c.merge_enabled = cv(15, 0) != 0.0;
  c.lr = cv(16, 0);
  c.batch_size = static_cast<int>(cv(17, 0));
  c.seed = static_cast<std::uint64_t>(cv(18, 0));
  c.temperature = cv(19, 0);
  c.mcts.iterations = static_cast<int>(cv(20, 0));
  c.mcts.min_nodes = static_cast<int>(cv(21, 0));
  c.mcts.expansion_width = static_cast<int>(cv(22, 0));
  c.mcts.exploration_c = cv(23, 0);
  c.mcts.rollout_limit = static_cast<int>(cv(24, 0));
  st.cfg = c;

  const Eigen::MatrixXd& meta = meta_it->second;
  st.protos.num_classes = num_classes;
  st.protos.per_class = c.per_class;
  st.protos.class_of.resize(meta.rows());
  st.protos.active.resize(meta.rows());
  for (long m = 0; m < meta.rows(); ++m) {
    st.protos.class_of[m] = static_cast<int>(meta(m, 0));
    st.protos.active[m] = meta(m, 1) != 0.0 ? 1 : 0;
  }

  arrays.erase(meta_it);
  arrays.erase(cfg_it);
  for (auto& [name, mat] : arrays) st.params.create(name, std::move(mat));
  return st;
}

}  // namespace protograph
