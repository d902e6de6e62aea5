#pragma once

#include "celsa/interactions.hpp"
#include "celsa/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace celsa {

// Scorer contract: interacted item-index set in, length-n score vector out.
using Scorer = std::function<Vec(const std::vector<int>&)>;

struct CutoffMetrics {
  double ndcg_mean = 0.0;
  double ndcg_stderr = 0.0;
  double recall_mean = 0.0;
  double recall_stderr = 0.0;
  std::vector<double> ndcg_per_user;
  std::vector<double> recall_per_user;
};

struct MetricReport {
  std::map<int, CutoffMetrics> by_cutoff;
  Index users_evaluated = 0;
  Index users_skipped = 0;
  double wall_seconds = 0.0;
};

struct FoldInConfig {
  double holdout_frac = 0.2;
  std::uint64_t seed = 0;
};

// Binary-gain nDCG over a ranking with no duplicates; positions 1-based.
double ndcg_at_k(const std::vector<int>& ranked,
                 const std::unordered_set<int>& targets, int k);

double recall_at_k(const std::vector<int>& ranked,
                   const std::unordered_set<int>& targets, int k);

// Strong-generalization protocol: per test user fold-in split, score from
// the inputs, rank with inputs excluded, measure against the targets.
// Users whose rows cannot be split are skipped.
MetricReport evaluate_model(const Scorer& scorer, const InteractionMatrix& test,
                            const FoldInConfig& protocol,
                            const std::vector<int>& cutoffs);

struct FixtureConfig {
  Index n_users = 2000;
  Index n_items = 500;
  int n_clusters = 10;
  double p_in = 0.2;
  double p_out = 0.01;
  std::uint64_t seed = 7;
  double val_frac = 0.1;
  double test_frac = 0.1;
};

struct Fixture {
  DatasetSplit split;
  std::vector<int> item_cluster;  // planted item -> cluster label
};

// Block-structured implicit feedback: users have a home cluster, interact
// with its items at p_in and elsewhere at p_out.
Fixture make_fixture(const FixtureConfig& cfg);

// Fresh users confined to a single cluster; used for segment alignment
// checks.
std::vector<std::pair<int, std::vector<int>>> sample_single_cluster_users(
    const FixtureConfig& cfg, const std::vector<int>& item_cluster,
    int count, std::uint64_t seed);

// Grid runner: trains every (model x seed) cell from a JSON spec, writes
// results.csv / results.json plus curves/*.csv under out_dir.
void run_experiment(const std::string& spec_path, const std::string& out_dir);

}  // namespace celsa
