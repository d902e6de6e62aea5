#include "celsa/evalkit.hpp"

#include "celsa/baselines.hpp"
#include "celsa/elsa.hpp"
#include "celsa/sparse_infer.hpp"
#include "celsa/sparsifier.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace celsa {

double ndcg_at_k(const std::vector<int>& ranked,
                 const std::unordered_set<int>& targets, int k) {
  if (targets.empty()) {
    throw std::invalid_argument("ndcg_at_k: empty target set");
  }
  double dcg = 0.0;
  const int limit = std::min<int>(k, static_cast<int>(ranked.size()));
  for (int pos = 1; pos <= limit; ++pos) {
    if (targets.count(ranked[static_cast<size_t>(pos - 1)])) {
      dcg += 1.0 / std::log2(static_cast<double>(pos) + 1.0);
    }
  }
  double idcg = 0.0;
  const int ideal = std::min<int>(k, static_cast<int>(targets.size()));
  for (int pos = 1; pos <= ideal; ++pos) {
    idcg += 1.0 / std::log2(static_cast<double>(pos) + 1.0);
  }
  return dcg / idcg;
}

double recall_at_k(const std::vector<int>& ranked,
                   const std::unordered_set<int>& targets, int k) {
  if (targets.empty()) {
    throw std::invalid_argument("recall_at_k: empty target set");
  }
  int hits = 0;
  const int limit = std::min<int>(k, static_cast<int>(ranked.size()));
  for (int pos = 0; pos < limit; ++pos) {
    if (targets.count(ranked[static_cast<size_t>(pos)])) ++hits;
  }
  return static_cast<double>(hits) /
         static_cast<double>(std::min<int>(k, static_cast<int>(targets.size())));
}

namespace {

void finalize(CutoffMetrics& m) {
  auto mean_stderr = [](const std::vector<double>& v, double& mean,
                        double& se) {
    mean = 0.0;
    se = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    const double sd = std::sqrt(sq / static_cast<double>(v.size() - 1));
    se = sd / std::sqrt(static_cast<double>(v.size()));
  };
  mean_stderr(m.ndcg_per_user, m.ndcg_mean, m.ndcg_stderr);
  mean_stderr(m.recall_per_user, m.recall_mean, m.recall_stderr);
}

std::uint64_t user_seed(std::uint64_t base, Index user) {
  return base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(user + 1);
}

}  // namespace

MetricReport evaluate_model(const Scorer& scorer, const InteractionMatrix& test,
                            const FoldInConfig& protocol,
                            const std::vector<int>& cutoffs) {
  const auto t0 = std::chrono::steady_clock::now();
  MetricReport report;
  const int max_cutoff =
      cutoffs.empty() ? 0 : *std::max_element(cutoffs.begin(), cutoffs.end());
  for (Index u = 0; u < test.n_users; ++u) {
    const auto& row = test.rows[static_cast<size_t>(u)];
    if (row.size() < 2) {
      ++report.users_skipped;
      continue;
    }
    const FoldInPair pair =
        fold_in_split(row, protocol.holdout_frac, user_seed(protocol.seed, u));
    if (pair.target_items.empty()) {
      ++report.users_skipped;
      continue;
    }
    Vec scores;
    try {
      scores = scorer(pair.input_items);
    } catch (const std::exception& e) {
      throw std::runtime_error("scorer failed for user " + std::to_string(u) +
                               ": " + e.what());
    }
    const RetrievalResult ranked = top_n(scores, pair.input_items, max_cutoff);
    const std::unordered_set<int> targets(pair.target_items.begin(),
                                          pair.target_items.end());
    for (int k : cutoffs) {
      auto& m = report.by_cutoff[k];
      m.ndcg_per_user.push_back(ndcg_at_k(ranked.items, targets, k));
      m.recall_per_user.push_back(recall_at_k(ranked.items, targets, k));
    }
    ++report.users_evaluated;
  }
  for (auto& [k, m] : report.by_cutoff) finalize(m);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

Fixture make_fixture(const FixtureConfig& cfg) {
  if (cfg.n_clusters < 1 || cfg.n_items < cfg.n_clusters) {
    throw std::invalid_argument("make_fixture: bad cluster count");
  }
  if (cfg.p_in <= cfg.p_out) {
    throw std::invalid_argument("make_fixture: p_in must exceed p_out");
  }
  Fixture fx;
  fx.item_cluster.resize(static_cast<size_t>(cfg.n_items));
  for (Index i = 0; i < cfg.n_items; ++i) {
    fx.item_cluster[static_cast<size_t>(i)] =
        static_cast<int>(i % cfg.n_clusters);
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> cluster_pick(0, cfg.n_clusters - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  InteractionMatrix X;
  X.n_items = cfg.n_items;
  for (Index u = 0; u < cfg.n_users; ++u) {
    const int home = cluster_pick(rng);
    std::vector<int> row;
    for (Index i = 0; i < cfg.n_items; ++i) {
      const double p =
          fx.item_cluster[static_cast<size_t>(i)] == home ? cfg.p_in
                                                          : cfg.p_out;
      if (coin(rng) < p) row.push_back(static_cast<int>(i));
    }
    if (!row.empty()) X.rows.push_back(std::move(row));
  }
  X.n_users = static_cast<Index>(X.rows.size());
  if (X.n_users < 3) {
    throw std::runtime_error("make_fixture: parameters produced too few users");
  }
  fx.split =
      split_strong_generalization(X, cfg.val_frac, cfg.test_frac, cfg.seed);
  return fx;
}

std::vector<std::pair<int, std::vector<int>>> sample_single_cluster_users(
    const FixtureConfig& cfg, const std::vector<int>& item_cluster, int count,
    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cluster_pick(0, cfg.n_clusters - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<int, std::vector<int>>> users;
  while (static_cast<int>(users.size()) < count) {
    const int home = cluster_pick(rng);
    std::vector<int> row;
    for (size_t i = 0; i < item_cluster.size(); ++i) {
      if (item_cluster[i] == home && coin(rng) < cfg.p_in) {
        row.push_back(static_cast<int>(i));
      }
    }
    if (row.size() >= 2) users.emplace_back(home, std::move(row));
  }
  return users;
}

namespace {

using nlohmann::json;

struct CellResult {
  std::string model;
  std::string type;
  std::uint64_t seed = 0;
  int d = 0;
  int k = 0;  // 0 when dense
  std::string schedule;
  std::size_t bytes_per_item = 0;
  double ndcg = 0.0;
  double ndcg_stderr = 0.0;
  double recall = 0.0;
};

ElsaConfig elsa_config_from(const json& spec, int d, std::uint64_t seed) {
  ElsaConfig cfg;
  cfg.d = d;
  cfg.epochs = spec.value("epochs", 16);
  cfg.batch_size = spec.value("batch_size", 128);
  cfg.learning_rate = spec.value("learning_rate", 0.01f);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

void run_experiment(const std::string& spec_path, const std::string& out_dir) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open experiment spec: " + spec_path);
  json spec;
  try {
    in >> spec;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("invalid experiment spec: " + std::string(e.what()));
  }
  for (const char* field : {"dataset", "models", "seeds"}) {
    if (!spec.contains(field)) {
      throw std::runtime_error("experiment spec missing field '" +
                               std::string(field) + "'");
    }
  }

  std::filesystem::create_directories(out_dir);
  std::filesystem::create_directories(out_dir + "/curves");

  const std::vector<int> cutoffs =
      spec.value("cutoffs", std::vector<int>{100});
  const int report_cutoff = cutoffs.front();
  FoldInConfig protocol;
  protocol.holdout_frac = spec.value("holdout_frac", 0.2);

  std::vector<CellResult> cells;
  for (const auto& seed_json : spec["seeds"]) {
    const auto seed = seed_json.get<std::uint64_t>();

    DatasetSplit split;
    const auto& ds = spec["dataset"];
    if (ds.contains("fixture")) {
      FixtureConfig fcfg;
      const auto& f = ds["fixture"];
      fcfg.n_users = f.value("n_users", fcfg.n_users);
      fcfg.n_items = f.value("n_items", fcfg.n_items);
      fcfg.n_clusters = f.value("n_clusters", fcfg.n_clusters);
      fcfg.p_in = f.value("p_in", fcfg.p_in);
      fcfg.p_out = f.value("p_out", fcfg.p_out);
      fcfg.seed = seed;
      split = make_fixture(fcfg).split;
    } else if (ds.contains("path")) {
      LoadOptions opts;
      opts.min_feedback = ds.value("min_feedback", 0.0);
      auto loaded = load_interactions(ds["path"].get<std::string>(), opts);
      split = split_strong_generalization(loaded.matrix,
                                          ds.value("val_frac", 0.1),
                                          ds.value("test_frac", 0.1), seed);
      split.item_vocab = std::move(loaded.item_vocab);
    } else {
      throw std::runtime_error(
          "experiment spec field 'dataset' needs 'fixture' or 'path'");
    }
    protocol.seed = seed;

    for (const auto& m : spec["models"]) {
      if (!m.contains("type")) {
        throw std::runtime_error("experiment spec model missing field 'type'");
      }
      const auto type = m["type"].get<std::string>();
      CellResult cell;
      cell.type = type;
      cell.seed = seed;
      cell.model = m.value("name", type);

      Scorer scorer;
      Mat dense_A;           // keeps dense embeddings alive for the scorer
      SparseInferenceEngine engine;
      Mat ease_B;
      SpMatR pruned_B;
      Vec pop;
      if (type == "dense") {
        cell.d = m.value("d", 128);
        ElsaConfig cfg = elsa_config_from(spec, cell.d, seed);
        ElsaModel model = init_model(split.train.n_items, cfg);
        train_dense(model, split.train);
        dense_A = model.A;
        cell.bytes_per_item = embedding_bytes_dense(cell.d);
        scorer = [&dense_A](const std::vector<int>& x) {
          return predict_scores(x, dense_A);
        };
      } else if (type == "compressed") {
        cell.d = m.value("d", 128);
        cell.k = m.value("k", 16);
        cell.schedule = m.value("schedule", std::string("exponential"));
        ElsaConfig cfg = elsa_config_from(spec, cell.d, seed);
        PruningSchedule sched;
        sched.kind = schedule_kind_from_string(cell.schedule);
        sched.d = cell.d;
        sched.k = cell.k;
        sched.T = cfg.epochs;
        sched.step_event = m.value("step_event", 10);
        const RestartPolicy policy =
            m.value("restart", std::string("init")) == "continue"
                ? RestartPolicy::Continue
                : RestartPolicy::RestartFromInit;
        CompressedModel cm = train_compressed(split.train, cfg, sched, policy);
        engine = build_engine(cm.A_bar_s);
        cell.bytes_per_item = embedding_bytes_sparse(cell.k);
        scorer = [&engine](const std::vector<int>& x) {
          return infer_scores(x, engine);
        };
      } else if (type == "ease" || type == "pruned_ease") {
        const double lambda = m.value("lambda", 500.0);
        EaseWeights w = ease_fit(split.train, lambda);
        if (type == "ease") {
          ease_B = w.B;
          cell.bytes_per_item =
              embedding_bytes_dense(static_cast<int>(split.train.n_items));
          scorer = [&ease_B](const std::vector<int>& x) {
            return ease_predict(x, ease_B);
          };
        } else {
          cell.k = m.value("k", 64);
          pruned_B = prune_rows(w, cell.k);
          cell.bytes_per_item = embedding_bytes_sparse(cell.k);
          scorer = [&pruned_B](const std::vector<int>& x) {
            return ease_predict(x, pruned_B);
          };
        }
      } else if (type == "popularity") {
        pop = popularity_scores(split.train);
        scorer = [&pop](const std::vector<int>&) { return pop; };
      } else {
        throw std::runtime_error("experiment spec: unknown model type '" +
                                 type + "'");
      }

      const MetricReport report =
          evaluate_model(scorer, split.test, protocol, cutoffs);
      const auto& metrics = report.by_cutoff.at(report_cutoff);
      cell.ndcg = metrics.ndcg_mean;
      cell.ndcg_stderr = metrics.ndcg_stderr;
      cell.recall = metrics.recall_mean;
      cells.push_back(cell);
    }
  }

  // results table
  {
    std::ofstream csv(out_dir + "/results.csv");
    csv << "model,type,seed,d,k,schedule,bytes_per_item,ndcg@"
        << report_cutoff << ",stderr,recall@" << report_cutoff << "\n";
    json jcells = json::array();
    for (const auto& c : cells) {
      csv << c.model << ',' << c.type << ',' << c.seed << ',' << c.d << ','
          << c.k << ',' << c.schedule << ',' << c.bytes_per_item << ','
          << c.ndcg << ',' << c.ndcg_stderr << ',' << c.recall << "\n";
      jcells.push_back({{"model", c.model},
                        {"type", c.type},
                        {"seed", c.seed},
                        {"d", c.d},
                        {"k", c.k},
                        {"schedule", c.schedule},
                        {"bytes_per_item", c.bytes_per_item},
                        {"ndcg", c.ndcg},
                        {"ndcg_stderr", c.ndcg_stderr},
                        {"recall", c.recall}});
    }
    std::ofstream jout(out_dir + "/results.json");
    jout << json{{"cutoff", report_cutoff}, {"results", jcells}}.dump(2)
         << "\n";
  }

  // curve data: mean ndcg vs final k per schedule, and vs d for dense models
  {
    std::map<std::pair<std::string, int>, std::pair<double, int>> by_sched_k;
    std::map<int, std::pair<double, int>> by_d;
    for (const auto& c : cells) {
      if (c.type == "compressed") {
        auto& acc = by_sched_k[{c.schedule, c.k}];
        acc.first += c.ndcg;
        acc.second += 1;
      } else if (c.type == "dense") {
        auto& acc = by_d[c.d];
        acc.first += c.ndcg;
        acc.second += 1;
      }
    }
    std::ofstream kcsv(out_dir + "/curves/ndcg_vs_k.csv");
    kcsv << "schedule,k,mean_ndcg\n";
    for (const auto& [key, acc] : by_sched_k) {
      kcsv << key.first << ',' << key.second << ','
           << acc.first / acc.second << "\n";
    }
    std::ofstream dcsv(out_dir + "/curves/ndcg_vs_d.csv");
    dcsv << "d,mean_ndcg\n";
    for (const auto& [d, acc] : by_d) {
      dcsv << d << ',' << acc.first / acc.second << "\n";
    }
  }
}

}  // namespace celsa
