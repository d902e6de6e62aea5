#include "celsa/interactions.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace celsa {

Index InteractionMatrix::nnz() const {
  Index total = 0;
  for (const auto& row : rows) total += static_cast<Index>(row.size());
  return total;
}

SpMatR InteractionMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<size_t>(nnz()));
  for (Index u = 0; u < n_users; ++u) {
    for (int item : rows[static_cast<size_t>(u)]) {
      triplets.emplace_back(static_cast<int>(u), item, 1.0f);
    }
  }
  SpMatR X(n_users, n_items);
  X.setFromTriplets(triplets.begin(), triplets.end());
  X.makeCompressed();
  return X;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  return fields;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

LoadResult load_interactions(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open interactions file: " + path);

  struct Record {
    std::string user;
    std::string item;
    bool positive;
  };
  std::vector<Record> records;
  std::string line;
  long line_no = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    auto fields = split_line(line, opts.delimiter);
    if (first_data_line) {
      first_data_line = false;
      // header detection: third column non-numeric, or two-column file whose
      // fields look like column names rather than ids followed by more rows
      if (fields.size() >= 3 && !is_number(fields[2])) continue;
    }
    if (fields.size() < 2) {
      throw std::runtime_error("malformed line " + std::to_string(line_no) +
                               " in " + path + ": expected user,item[,rating]");
    }
    double rating = 0.0;
    bool has_rating = fields.size() >= 3 && !fields[2].empty();
    if (has_rating) {
      if (!is_number(fields[2])) {
        throw std::runtime_error("malformed line " + std::to_string(line_no) +
                                 " in " + path + ": bad rating '" + fields[2] +
                                 "'");
      }
      rating = std::stod(fields[2]);
    }
    const bool positive = !has_rating || rating >= opts.min_feedback;
    records.push_back({fields[0], fields[1], positive});
  }

  // Densify in first-appearance order among surviving records.
  std::unordered_map<std::string, int> user_ids;
  std::unordered_map<std::string, int> item_ids;
  LoadResult result;
  auto intern = [](std::unordered_map<std::string, int>& map,
                   std::vector<std::string>& vocab, const std::string& key) {
    auto [it, inserted] = map.emplace(key, static_cast<int>(vocab.size()));
    if (inserted) vocab.push_back(key);
    return it->second;
  };
  std::vector<std::set<int>> row_sets;
  for (const auto& rec : records) {
    if (!rec.positive && !opts.keep_all_items) continue;
    if (opts.keep_all_items) intern(item_ids, result.item_vocab, rec.item);
    if (!rec.positive) continue;
    const int u = intern(user_ids, result.user_vocab, rec.user);
    const int i = intern(item_ids, result.item_vocab, rec.item);
    if (static_cast<size_t>(u) >= row_sets.size()) row_sets.resize(u + 1);
    row_sets[static_cast<size_t>(u)].insert(i);
  }
  if (row_sets.empty()) {
    throw std::runtime_error("empty result: no interactions in " + path +
                             " at min_feedback threshold");
  }
  result.matrix.n_users = static_cast<Index>(row_sets.size());
  result.matrix.n_items = static_cast<Index>(result.item_vocab.size());
  result.matrix.rows.reserve(row_sets.size());
  for (auto& s : row_sets) {
    result.matrix.rows.emplace_back(s.begin(), s.end());
  }
  return result;
}

DatasetSplit split_strong_generalization(const InteractionMatrix& X,
                                         double val_frac, double test_frac,
                                         std::uint64_t seed) {
  if (val_frac < 0.0 || test_frac < 0.0 || val_frac + test_frac >= 1.0) {
    throw std::invalid_argument(
        "split fractions must be non-negative with val_frac + test_frac < 1");
  }
  if (X.n_users < 3) {
    throw std::invalid_argument("need at least 3 users to split");
  }

  std::vector<Index> order(static_cast<size_t>(X.n_users));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto val_count = static_cast<Index>(
      static_cast<double>(X.n_users) * val_frac);
  const auto test_count = static_cast<Index>(
      static_cast<double>(X.n_users) * test_frac);

  enum Part { kTrain, kVal, kTest };
  std::vector<Part> assignment(static_cast<size_t>(X.n_users), kTrain);
  Index val_assigned = 0, test_assigned = 0;
  for (Index u : order) {
    const bool eligible = X.rows[static_cast<size_t>(u)].size() >= 2;
    if (eligible && val_assigned < val_count) {
      assignment[static_cast<size_t>(u)] = kVal;
      ++val_assigned;
    } else if (eligible && test_assigned < test_count) {
      assignment[static_cast<size_t>(u)] = kTest;
      ++test_assigned;
    }
  }

  DatasetSplit split;
  auto& parts = split;
  auto push = [&](InteractionMatrix& M, Index u) {
    M.rows.push_back(X.rows[static_cast<size_t>(u)]);
  };
  for (Index u = 0; u < X.n_users; ++u) {
    switch (assignment[static_cast<size_t>(u)]) {
      case kTrain: push(parts.train, u); break;
      case kVal: push(parts.validation, u); break;
      case kTest: push(parts.test, u); break;
    }
  }
  for (auto* M : {&split.train, &split.validation, &split.test}) {
    M->n_users = static_cast<Index>(M->rows.size());
    M->n_items = X.n_items;
  }
  return split;
}

FoldInPair fold_in_split(const std::vector<int>& user_row, double holdout_frac,
                         std::uint64_t seed) {
  if (user_row.size() < 2) {
    throw std::invalid_argument("fold_in_split: row too small to split");
  }
  if (holdout_frac <= 0.0 || holdout_frac >= 1.0) {
    throw std::invalid_argument("fold_in_split: holdout_frac must be in (0,1)");
  }
  std::vector<int> shuffled = user_row;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto holdout = static_cast<size_t>(
      std::ceil(holdout_frac * static_cast<double>(user_row.size())));
  holdout = std::min(holdout, user_row.size() - 1);
  FoldInPair pair;
  pair.target_items.assign(shuffled.begin(),
                           shuffled.begin() + static_cast<long>(holdout));
  pair.input_items.assign(shuffled.begin() + static_cast<long>(holdout),
                          shuffled.end());
  std::sort(pair.target_items.begin(), pair.target_items.end());
  std::sort(pair.input_items.begin(), pair.input_items.end());
  return pair;
}

void write_split_manifest(const std::string& path, const DatasetSplit& split,
                          double val_frac, double test_frac,
                          std::uint64_t seed) {
  nlohmann::json j;
  j["n_items"] = split.train.n_items;
  j["users"] = {{"train", split.train.n_users},
                {"validation", split.validation.n_users},
                {"test", split.test.n_users}};
  j["val_frac"] = val_frac;
  j["test_frac"] = test_frac;
  j["seed"] = seed;
  j["item_vocab"] = split.item_vocab;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

void write_interactions_csv(const std::string& path,
                            const InteractionMatrix& X) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  for (Index u = 0; u < X.n_users; ++u) {
    for (int item : X.rows[static_cast<size_t>(u)]) {
      out << u << ',' << item << '\n';
    }
  }
}

}  // namespace celsa
