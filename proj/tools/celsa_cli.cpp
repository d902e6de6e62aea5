// Command-line front end for the celsa library: ingest, split, train,
// compress, baselines, evaluation, segments, recommendations, and the
// experiment grid runner. One subcommand per pipeline stage; every
// artifact-producing run drops config.json and manifest.json into --out.

#include "celsa/baselines.hpp"
#include "celsa/elsa.hpp"
#include "celsa/evalkit.hpp"
#include "celsa/io.hpp"
#include "celsa/segments.hpp"
#include "celsa/sparse_infer.hpp"
#include "celsa/sparsifier.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace celsa;

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_run_records(const std::string& out_dir, const json& config,
                       std::vector<std::string> files) {
  write_text(out_dir + "/config.json", config.dump(2) + "\n");
  files.push_back("config.json");
  files.push_back("manifest.json");
  json manifest;
  manifest["files"] = files;
  write_text(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

InteractionMatrix load_matrix(const std::string& path, double min_feedback) {
  LoadOptions opts;
  opts.min_feedback = min_feedback;
  auto result = load_interactions(path, opts);
  std::cerr << "loaded " << result.matrix.n_users << " users x "
            << result.matrix.n_items << " items, " << result.matrix.nnz()
            << " interactions from " << path << "\n";
  return result.matrix;
}

// Model checkpoint: model.spem (matrix) + model.json (kind + metadata).
void save_model(const std::string& out_dir, const std::string& kind,
                const SpMatR& M, json meta) {
  write_spem(out_dir + "/model.spem", M);
  meta["kind"] = kind;
  meta["rows"] = M.rows();
  meta["cols"] = M.cols();
  write_text(out_dir + "/model.json", meta.dump(2) + "\n");
}

struct LoadedModel {
  std::string kind;
  json meta;
  SpMatR matrix;
};

LoadedModel load_model(const std::string& model_path) {
  LoadedModel m;
  m.matrix = read_spem(model_path).matrix;
  const fs::path sidecar = fs::path(model_path).replace_extension(".json");
  std::ifstream in(sidecar);
  if (!in) {
    throw std::runtime_error("missing model sidecar " + sidecar.string());
  }
  in >> m.meta;
  m.kind = m.meta.value("kind", "");
  if (m.kind.empty()) {
    throw std::runtime_error("model sidecar lacks a \"kind\" field");
  }
  return m;
}

// Uniform scoring interface over every stored model kind.
struct ScoringContext {
  LoadedModel model;
  Mat dense;                     // dense / ease / popularity kinds
  SparseInferenceEngine engine;  // compressed kind

  explicit ScoringContext(LoadedModel m) : model(std::move(m)) {
    if (model.kind == "compressed") {
      engine = build_engine(model.matrix);
    } else {
      dense = Mat(model.matrix);
    }
  }

  Index n_items() const { return model.kind == "popularity"
                                     ? model.matrix.cols()
                                     : model.matrix.rows(); }

  Vec score(const std::vector<int>& items) const {
    if (model.kind == "dense") return predict_scores(items, dense);
    if (model.kind == "compressed") return infer_scores(items, engine);
    if (model.kind == "ease") return ease_predict(items, dense);
    if (model.kind == "ease_pruned") return ease_predict(items, model.matrix);
    if (model.kind == "popularity") return dense.row(0).transpose();
    throw std::runtime_error("unknown model kind: " + model.kind);
  }
};

std::vector<EpochStats> log_epochs(const std::vector<EpochStats>& stats) {
  for (size_t e = 0; e < stats.size(); ++e) {
    std::cerr << "epoch " << e << ": loss " << stats[e].loss << "\n";
  }
  return stats;
}

json loss_curve(const std::vector<EpochStats>& stats) {
  json curve = json::array();
  for (const auto& s : stats) curve.push_back(s.loss);
  return curve;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

// ------------------------------------------------------------- subcommands

struct SplitArgs {
  std::string data, out;
  std::uint64_t seed = 42;
  double val_frac = 0.1, test_frac = 0.1, min_feedback = 0.0;
};

int run_split(const SplitArgs& a) {
  fs::create_directories(a.out);
  auto X = load_matrix(a.data, a.min_feedback);
  auto split = split_strong_generalization(X, a.val_frac, a.test_frac, a.seed);
  write_interactions_csv(a.out + "/train.csv", split.train);
  write_interactions_csv(a.out + "/validation.csv", split.validation);
  write_interactions_csv(a.out + "/test.csv", split.test);
  write_split_manifest(a.out + "/split.json", split, a.val_frac, a.test_frac,
                       a.seed);
  write_run_records(a.out,
                    {{"subcommand", "split"},
                     {"data", a.data},
                     {"seed", a.seed},
                     {"val_frac", a.val_frac},
                     {"test_frac", a.test_frac},
                     {"min_feedback", a.min_feedback}},
                    {"train.csv", "validation.csv", "test.csv", "split.json"});
  std::cerr << "split written to " << a.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string data, out;
  ElsaConfig config;
  double min_feedback = 0.0;
};

int run_train(const TrainArgs& a) {
  fs::create_directories(a.out);
  auto X = load_matrix(a.data, a.min_feedback);
  ElsaModel model = init_model(X.n_items, a.config);
  auto stats = log_epochs(train_dense(model, X));
  save_model(a.out, "dense", model.A.sparseView(),
             {{"d", a.config.d},
              {"epochs", a.config.epochs},
              {"batch_size", a.config.batch_size},
              {"learning_rate", a.config.learning_rate},
              {"seed", a.config.seed},
              {"loss_curve", loss_curve(stats)}});
  write_run_records(a.out,
                    {{"subcommand", "train"},
                     {"data", a.data},
                     {"d", a.config.d},
                     {"epochs", a.config.epochs},
                     {"batch_size", a.config.batch_size},
                     {"learning_rate", a.config.learning_rate},
                     {"seed", a.config.seed}},
                    {"model.spem", "model.json"});
  std::cerr << "dense model written to " << a.out << "\n";
  return 0;
}

struct CompressArgs {
  std::string data, out, schedule = "exponential", restart = "init";
  int k = 0;
  ElsaConfig config;
  double min_feedback = 0.0;
};

int run_compress(const CompressArgs& a) {
  fs::create_directories(a.out);
  auto X = load_matrix(a.data, a.min_feedback);
  PruningSchedule schedule;
  schedule.kind = schedule_kind_from_string(a.schedule);
  schedule.d = a.config.d;
  schedule.k = a.k;
  schedule.T = a.config.epochs;
  const RestartPolicy policy = a.restart == "init"
                                   ? RestartPolicy::RestartFromInit
                                   : RestartPolicy::Continue;
  auto cm = train_compressed(X, a.config, schedule, policy);
  log_epochs(cm.stats);
  std::cerr << "dead rows " << cm.dead.dead_rows << ", dead columns "
            << cm.dead.dead_columns << "\n";
  save_model(a.out, "compressed", cm.A_bar_s,
             {{"d", a.config.d},
              {"k", a.k},
              {"schedule", a.schedule},
              {"restart", a.restart},
              {"epochs", a.config.epochs},
              {"batch_size", a.config.batch_size},
              {"learning_rate", a.config.learning_rate},
              {"seed", a.config.seed},
              {"dead_rows", cm.dead.dead_rows},
              {"dead_columns", cm.dead.dead_columns},
              {"bytes_per_item", embedding_bytes_sparse(a.k)},
              {"loss_curve", loss_curve(cm.stats)}});
  write_run_records(a.out,
                    {{"subcommand", "compress"},
                     {"data", a.data},
                     {"d", a.config.d},
                     {"k", a.k},
                     {"schedule", a.schedule},
                     {"restart", a.restart},
                     {"epochs", a.config.epochs},
                     {"batch_size", a.config.batch_size},
                     {"learning_rate", a.config.learning_rate},
                     {"seed", a.config.seed}},
                    {"model.spem", "model.json"});
  std::cerr << "compressed model written to " << a.out << "\n";
  return 0;
}

struct BaselineArgs {
  std::string method, data, out;
  double lambda = 500.0;
  int k = 0;  // optional EASE row pruning
  double min_feedback = 0.0;
};

int run_baseline(const BaselineArgs& a) {
  fs::create_directories(a.out);
  auto X = load_matrix(a.data, a.min_feedback);
  if (a.method == "ease") {
    auto weights = ease_fit(X, a.lambda);
    json meta = {{"lambda", a.lambda}};
    if (a.k > 0) {
      meta["k"] = a.k;
      save_model(a.out, "ease_pruned", prune_rows(weights, a.k), meta);
    } else {
      save_model(a.out, "ease", weights.B.sparseView(), meta);
    }
  } else if (a.method == "popularity") {
    Vec scores = popularity_scores(X);
    SpMatR row(1, X.n_items);
    for (Index i = 0; i < X.n_items; ++i) {
      if (scores[i] != 0.0f) row.insert(0, i) = scores[i];
    }
    row.makeCompressed();
    save_model(a.out, "popularity", row, json::object());
  } else {
    std::cerr << "unknown baseline method: " << a.method
              << " (expected ease or popularity)\n";
    return 1;
  }
  write_run_records(a.out,
                    {{"subcommand", "baseline"},
                     {"method", a.method},
                     {"data", a.data},
                     {"lambda", a.lambda},
                     {"k", a.k}},
                    {"model.spem", "model.json"});
  std::cerr << a.method << " baseline written to " << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string model, data, out, cutoffs = "20,100";
  double holdout = 0.2, min_feedback = 0.0;
  std::uint64_t seed = 42;
};

int run_eval(const EvalArgs& a) {
  fs::create_directories(a.out);
  ScoringContext ctx(load_model(a.model));
  auto test = load_matrix(a.data, a.min_feedback);
  if (test.n_items > ctx.n_items()) {
    throw std::runtime_error("test set has more items than the model");
  }
  FoldInConfig protocol;
  protocol.holdout_frac = a.holdout;
  protocol.seed = a.seed;
  const auto cutoffs = parse_int_list(a.cutoffs);
  auto report = evaluate_model(
      [&](const std::vector<int>& items) { return ctx.score(items); }, test,
      protocol, cutoffs);

  json metrics;
  metrics["users_evaluated"] = report.users_evaluated;
  metrics["users_skipped"] = report.users_skipped;
  metrics["wall_seconds"] = report.wall_seconds;
  std::ostringstream csv;
  csv << "cutoff,ndcg_mean,ndcg_stderr,recall_mean,recall_stderr\n";
  for (const auto& [k, m] : report.by_cutoff) {
    metrics["cutoffs"][std::to_string(k)] = {
        {"ndcg_mean", m.ndcg_mean},
        {"ndcg_stderr", m.ndcg_stderr},
        {"recall_mean", m.recall_mean},
        {"recall_stderr", m.recall_stderr}};
    csv << k << "," << m.ndcg_mean << "," << m.ndcg_stderr << ","
        << m.recall_mean << "," << m.recall_stderr << "\n";
    std::cerr << "nDCG@" << k << " = " << m.ndcg_mean << " (+/- "
              << m.ndcg_stderr << "), recall@" << k << " = " << m.recall_mean
              << "\n";
  }
  write_text(a.out + "/metrics.json", metrics.dump(2) + "\n");
  write_text(a.out + "/metrics.csv", csv.str());
  write_run_records(a.out,
                    {{"subcommand", "eval"},
                     {"model", a.model},
                     {"data", a.data},
                     {"cutoffs", a.cutoffs},
                     {"holdout", a.holdout},
                     {"seed", a.seed}},
                    {"metrics.json", "metrics.csv"});
  return 0;
}

struct SegmentArgs {
  std::string model, metadata, out;
  double tau = 0.8;
};

int run_segment(const SegmentArgs& a) {
  fs::create_directories(a.out);
  auto model = load_model(a.model);
  if (model.kind != "compressed") {
    throw std::runtime_error("segment requires a compressed model");
  }
  auto meta = load_item_metadata(a.metadata, model.matrix.rows());
  TokenFrequencyProvider provider(meta);
  auto grouping = group_items(model.matrix);
  std::cerr << grouping.groups.size() << " initial groups, "
            << grouping.unsegmented.size() << " unsegmented items\n";
  auto set = merge_segments(grouping.groups, provider, meta, a.tau,
                            model.matrix.cols());
  std::cerr << set.segments.size() << " segments after merging (tau " << a.tau
            << ")\n";
  write_segments_json(a.out + "/segments.json", set);
  write_spem(a.out + "/segment_matrix.spem", set.segment_matrix);
  write_run_records(a.out,
                    {{"subcommand", "segment"},
                     {"model", a.model},
                     {"metadata", a.metadata},
                     {"tau", a.tau}},
                    {"segments.json", "segment_matrix.spem"});
  return 0;
}

struct RecommendArgs {
  std::string model, items;
  int n = 10;
  bool exclude_seen = false;
};

int run_recommend(const RecommendArgs& a) {
  ScoringContext ctx(load_model(a.model));
  const auto items = parse_int_list(a.items);
  for (int i : items) {
    if (i < 0 || i >= ctx.n_items()) {
      throw std::runtime_error("item index out of range: " + std::to_string(i));
    }
  }
  Vec scores = ctx.score(items);
  auto result = top_n(scores, a.exclude_seen ? items : std::vector<int>{},
                      a.n);
  json out = json::array();
  for (size_t i = 0; i < result.items.size(); ++i) {
    out.push_back({{"item", result.items[i]}, {"score", result.scores[i]}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct ExperimentArgs {
  std::string spec, out;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  run_experiment(a.spec, a.out);
  std::ifstream spec_in(a.spec);
  json spec;
  spec_in >> spec;
  write_run_records(a.out,
                    {{"subcommand", "experiment"},
                     {"spec_path", a.spec},
                     {"spec", spec}},
                    {"results.csv", "results.json", "curves/ndcg_vs_k.csv",
                     "curves/ndcg_vs_d.csv"});
  std::cerr << "experiment results written to " << a.out << "\n";
  return 0;
}

void add_train_flags(CLI::App* cmd, ElsaConfig& cfg) {
  cmd->add_option("--d", cfg.d, "embedding dimensionality");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--batch-size", cfg.batch_size, "mini-batch size");
  cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate");
  cmd->add_option("--seed", cfg.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse item-embedding toolkit: dense and compressed linear "
               "autoencoders, baselines, segments, evaluation"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "strong-generalization split");
  split_cmd->add_option("--data", split_args.data, "interactions csv")
      ->required();
  split_cmd->add_option("--out", split_args.out, "output directory")
      ->required();
  split_cmd->add_option("--seed", split_args.seed, "random seed");
  split_cmd->add_option("--val-frac", split_args.val_frac, "validation fraction");
  split_cmd->add_option("--test-frac", split_args.test_frac, "test fraction");
  split_cmd->add_option("--min-feedback", split_args.min_feedback,
                        "rating threshold for binarization");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train dense embeddings");
  train_cmd->add_option("--data", train_args.data, "train csv")->required();
  train_cmd->add_option("--out", train_args.out, "output directory")
      ->required();
  train_cmd->add_option("--min-feedback", train_args.min_feedback,
                        "rating threshold for binarization");
  add_train_flags(train_cmd, train_args.config);

  CompressArgs compress_args;
  auto* compress_cmd =
      app.add_subcommand("compress", "train sparsity-constrained embeddings");
  compress_cmd->add_option("--data", compress_args.data, "train csv")
      ->required();
  compress_cmd->add_option("--out", compress_args.out, "output directory")
      ->required();
  compress_cmd->add_option("--k", compress_args.k, "target nonzeros per row")
      ->required();
  compress_cmd->add_option("--schedule", compress_args.schedule,
                           "constant|linear|exponential|stepwise");
  compress_cmd
      ->add_option("--restart", compress_args.restart,
                   "init|continue: policy after each pruning event")
      ->check(CLI::IsMember({"init", "continue"}));
  compress_cmd->add_option("--min-feedback", compress_args.min_feedback,
                           "rating threshold for binarization");
  add_train_flags(compress_cmd, compress_args.config);

  BaselineArgs baseline_args;
  auto* baseline_cmd = app.add_subcommand("baseline", "EASE or popularity");
  baseline_cmd
      ->add_option("method", baseline_args.method, "ease|popularity")
      ->required();
  baseline_cmd->add_option("--data", baseline_args.data, "train csv")
      ->required();
  baseline_cmd->add_option("--out", baseline_args.out, "output directory")
      ->required();
  baseline_cmd->add_option("--lambda", baseline_args.lambda,
                           "EASE ridge strength");
  baseline_cmd->add_option("--k", baseline_args.k,
                           "optional EASE row-wise top-k pruning");
  baseline_cmd->add_option("--min-feedback", baseline_args.min_feedback,
                           "rating threshold for binarization");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "fold-in evaluation");
  eval_cmd->add_option("--model", eval_args.model, "model.spem path")
      ->required();
  eval_cmd->add_option("--data", eval_args.data, "test csv")->required();
  eval_cmd->add_option("--out", eval_args.out, "output directory")->required();
  eval_cmd->add_option("--cutoffs", eval_args.cutoffs, "comma-separated k");
  eval_cmd->add_option("--holdout", eval_args.holdout,
                       "per-user fold-in holdout fraction");
  eval_cmd->add_option("--seed", eval_args.seed, "random seed");
  eval_cmd->add_option("--min-feedback", eval_args.min_feedback,
                       "rating threshold for binarization");

  SegmentArgs segment_args;
  auto* segment_cmd =
      app.add_subcommand("segment", "interpretable segments from embeddings");
  segment_cmd->add_option("--model", segment_args.model, "compressed model")
      ->required();
  segment_cmd->add_option("--metadata", segment_args.metadata,
                          "item metadata csv (id,title,tags)")
      ->required();
  segment_cmd->add_option("--out", segment_args.out, "output directory")
      ->required();
  segment_cmd->add_option("--tau", segment_args.tau,
                          "merge similarity threshold");

  RecommendArgs recommend_args;
  auto* recommend_cmd =
      app.add_subcommand("recommend", "top-N items for an interaction set");
  recommend_cmd->add_option("--model", recommend_args.model, "model.spem path")
      ->required();
  recommend_cmd
      ->add_option("--items", recommend_args.items,
                   "comma-separated interacted item indices")
      ->required();
  recommend_cmd->add_option("--n", recommend_args.n, "list length");
  recommend_cmd->add_flag("--exclude-seen", recommend_args.exclude_seen,
                          "drop the input items from the list");

  ExperimentArgs experiment_args;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "grid runner from a JSON spec");
  experiment_cmd->add_option("--spec", experiment_args.spec, "experiment spec")
      ->required();
  experiment_cmd->add_option("--out", experiment_args.out, "output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*split_cmd) return run_split(split_args);
    if (*train_cmd) return run_train(train_args);
    if (*compress_cmd) return run_compress(compress_args);
    if (*baseline_cmd) return run_baseline(baseline_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*segment_cmd) return run_segment(segment_args);
    if (*recommend_cmd) return run_recommend(recommend_args);
    if (*experiment_cmd) return run_experiment_cmd(experiment_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
