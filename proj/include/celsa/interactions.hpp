#pragma once

#include "celsa/types.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace celsa {

// Binarized implicit-feedback matrix. Rows hold sorted, unique item indices;
// presence means 1.
struct InteractionMatrix {
  Index n_users = 0;
  Index n_items = 0;
  std::vector<std::vector<int>> rows;

  Index nnz() const;
  SpMatR to_sparse() const;
};

struct DatasetSplit {
  InteractionMatrix train;
  InteractionMatrix validation;
  InteractionMatrix test;
  std::vector<std::string> item_vocab;  // dense index -> raw item id
};

struct FoldInPair {
  std::vector<int> input_items;
  std::vector<int> target_items;
};

struct LoadOptions {
  double min_feedback = 0.0;
  char delimiter = ',';
  bool keep_all_items = false;
};

struct LoadResult {
  InteractionMatrix matrix;
  std::vector<std::string> user_vocab;
  std::vector<std::string> item_vocab;
};

// Parses `user,item[,rating]` lines. Rows binarize as rating >= min_feedback.
// Ids are densified in order of first appearance among surviving records;
// items never reaching the threshold are dropped unless keep_all_items is set.
// A non-numeric first row is treated as a header and skipped.
LoadResult load_interactions(const std::string& path, const LoadOptions& opts);

// Seeded user permutation, then partition into (train, validation, test).
// Users with fewer than 2 interactions never land in validation/test.
DatasetSplit split_strong_generalization(const InteractionMatrix& X,
                                         double val_frac, double test_frac,
                                         std::uint64_t seed);

// Moves ceil(holdout_frac * |row|) items to targets via a seeded shuffle.
FoldInPair fold_in_split(const std::vector<int>& user_row, double holdout_frac,
                         std::uint64_t seed);

void write_split_manifest(const std::string& path, const DatasetSplit& split,
                          double val_frac, double test_frac,
                          std::uint64_t seed);

void write_interactions_csv(const std::string& path,
                            const InteractionMatrix& X);

}  // namespace celsa
