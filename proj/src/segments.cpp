#include "celsa/segments.hpp"

#include "celsa/sparse_infer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace celsa {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

ItemMetadata load_item_metadata(const std::string& path, Index n_items,
                                char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metadata file: " + path);
  ItemMetadata meta;
  meta.tokens.resize(static_cast<size_t>(n_items));
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id_field, rest;
    if (!std::getline(ss, id_field, delimiter)) continue;
    std::getline(ss, rest);
    char* end = nullptr;
    const long id = std::strtol(id_field.c_str(), &end, 10);
    if (end == id_field.c_str()) {
      if (line_no == 1) continue;  // header
      throw std::runtime_error("metadata line " + std::to_string(line_no) +
                               ": bad item id '" + id_field + "'");
    }
    if (id < 0 || id >= n_items) continue;  // unknown item, ignore
    auto toks = tokenize(rest);
    auto& slot = meta.tokens[static_cast<size_t>(id)];
    slot.insert(slot.end(), toks.begin(), toks.end());
  }
  return meta;
}

TokenFrequencyProvider::TokenFrequencyProvider(const ItemMetadata& metadata) {
  for (const auto& toks : metadata.tokens) {
    for (const auto& t : toks) {
      vocab_.emplace(t, 0);
    }
  }
  int id = 0;
  for (auto& [token, index] : vocab_) index = id++;
}

std::string TokenFrequencyProvider::describe(
    const std::vector<int>& members, const ItemMetadata& metadata) const {
  std::map<std::string, int> counts;
  for (int item : members) {
    if (item < 0 || static_cast<size_t>(item) >= metadata.tokens.size()) {
      continue;
    }
    for (const auto& t : metadata.tokens[static_cast<size_t>(item)]) {
      ++counts[t];
    }
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::string descriptor;
  const size_t top = std::min<size_t>(5, ranked.size());
  for (size_t i = 0; i < top; ++i) {
    if (i) descriptor += ' ';
    descriptor += ranked[i].first;
  }
  return descriptor;
}

Vec TokenFrequencyProvider::embed(const std::string& descriptor) const {
  Vec v = Vec::Zero(static_cast<Index>(vocab_.size()));
  for (const auto& t : tokenize(descriptor)) {
    auto it = vocab_.find(t);
    if (it != vocab_.end()) v[it->second] += 1.0f;
  }
  const double norm = v.cast<double>().norm();
  if (norm > 0.0) v /= static_cast<Scalar>(norm);
  return v;
}

SignedFactor dominant_factor(const SpMatR& A_bar_s, Index item) {
  if (item < 0 || item >= A_bar_s.rows()) {
    throw std::out_of_range("dominant_factor: item out of range");
  }
  SignedFactor best;
  float best_abs = -1.0f;
  for (SpMatR::InnerIterator it(A_bar_s, item); it; ++it) {
    const float a = std::abs(it.value());
    if (a > best_abs) {  // sorted inner indices: first hit wins ties
      best_abs = a;
      best.dim = static_cast<int>(it.col());
      best.sign = it.value() >= 0.0f ? 1 : -1;
    }
  }
  if (best_abs <= 0.0f) {
    throw DominantFactorError("dominant_factor: dead row for item " +
                              std::to_string(item));
  }
  return best;
}

GroupingResult group_items(const SpMatR& A_bar_s) {
  GroupingResult result;
  std::map<SignedFactor, std::vector<int>> buckets;
  for (Index i = 0; i < A_bar_s.rows(); ++i) {
    try {
      buckets[dominant_factor(A_bar_s, i)].push_back(static_cast<int>(i));
    } catch (const DominantFactorError&) {
      result.unsegmented.push_back(i);
    }
  }
  for (auto& [factor, members] : buckets) {
    ItemGroup group;
    group.members = std::move(members);
    group.factors = {factor};
    result.groups.push_back(std::move(group));
  }
  return result;
}

namespace {

double cosine(const Vec& a, const Vec& b) {
  const double na = a.cast<double>().norm();
  const double nb = b.cast<double>().norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.cast<double>().dot(b.cast<double>()) / (na * nb);
}

}  // namespace

SegmentSet merge_segments(std::vector<ItemGroup> groups,
                          const DescriptorProvider& provider,
                          const ItemMetadata& metadata, double tau, Index d) {
  if (tau < -1.0 || tau > 1.0) {
    throw std::invalid_argument("merge_segments: tau must be in [-1, 1]");
  }
  for (auto& g : groups) {
    g.descriptor = provider.describe(g.members, metadata);
    g.descriptor_vector = provider.embed(g.descriptor);
  }

  while (groups.size() > 1) {
    double best_sim = tau;
    size_t best_j = 0, best_k = 0;
    bool found = false;
    for (size_t j = 0; j < groups.size(); ++j) {
      for (size_t k = j + 1; k < groups.size(); ++k) {
        const double sim =
            cosine(groups[j].descriptor_vector, groups[k].descriptor_vector);
        if (sim > best_sim) {
          best_sim = sim;
          best_j = j;
          best_k = k;
          found = true;
        }
      }
    }
    if (!found) break;

    ItemGroup merged;
    auto& a = groups[best_j];
    auto& b = groups[best_k];
    std::merge(a.members.begin(), a.members.end(), b.members.begin(),
               b.members.end(), std::back_inserter(merged.members));
    std::set<SignedFactor> factors(a.factors.begin(), a.factors.end());
    factors.insert(b.factors.begin(), b.factors.end());
    merged.factors.assign(factors.begin(), factors.end());
    merged.descriptor = provider.describe(merged.members, metadata);
    merged.descriptor_vector = provider.embed(merged.descriptor);
    if (merged.descriptor_vector.cast<double>().norm() == 0.0) {
      // provider had nothing to say; fall back to the mean of constituents
      merged.descriptor_vector =
          a.descriptor_vector + b.descriptor_vector;
      const double norm = merged.descriptor_vector.cast<double>().norm();
      if (norm > 0.0) merged.descriptor_vector /= static_cast<Scalar>(norm);
    }
    groups[best_j] = std::move(merged);
    groups.erase(groups.begin() + static_cast<long>(best_k));
  }

  SegmentSet set;
  set.tau = tau;
  set.segments = std::move(groups);
  set.segment_matrix = build_segment_matrix(set.segments, d);
  return set;
}

SpMatR build_segment_matrix(const std::vector<ItemGroup>& segments, Index d,
                            const SpMatR* A_bar_s) {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (size_t c = 0; c < segments.size(); ++c) {
    const auto& seg = segments[c];
    // resolve sign conflicts: per dim keep the sign with more member support
    std::map<int, int> chosen;  // dim -> sign
    for (const auto& f : seg.factors) {
      if (f.dim < 0 || f.dim >= d) {
        throw std::invalid_argument("build_segment_matrix: dim out of range");
      }
      auto it = chosen.find(f.dim);
      if (it == chosen.end()) {
        chosen[f.dim] = f.sign;
        continue;
      }
      // conflicting signs for one dim within L_c
      int support_pos = 0, support_neg = 0;
      if (A_bar_s != nullptr) {
        for (int item : seg.members) {
          const auto df = dominant_factor(*A_bar_s, item);
          if (df.dim == f.dim) (df.sign > 0 ? support_pos : support_neg)++;
        }
      }
      it->second = support_neg > support_pos ? -1 : 1;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(chosen.size()));
    for (const auto& [dim, sign] : chosen) {
      triplets.emplace_back(static_cast<int>(c), dim,
                            static_cast<Scalar>(sign * scale));
    }
  }
  SpMatR B(static_cast<Index>(segments.size()), d);
  B.setFromTriplets(triplets.begin(), triplets.end());
  B.makeCompressed();
  return B;
}

Vec segment_scores(const std::vector<int>& x_items, const SpMatR& A_bar_s,
                   const SpMatR& B_bar_s) {
  if (A_bar_s.cols() != B_bar_s.cols()) {
    throw std::invalid_argument("segment_scores: latent dimension mismatch");
  }
  const Vec z = embed_user(x_items, A_bar_s);
  DVec scores = DVec::Zero(B_bar_s.rows());
  for (Index c = 0; c < B_bar_s.outerSize(); ++c) {
    double acc = 0.0;
    for (SpMatR::InnerIterator it(B_bar_s, c); it; ++it) {
      acc += static_cast<double>(it.value()) * static_cast<double>(z[it.col()]);
    }
    scores[c] = acc;
  }
  return scores.cast<Scalar>();
}

void write_segments_json(const std::string& path, const SegmentSet& set) {
  nlohmann::json segments = nlohmann::json::array();
  for (size_t c = 0; c < set.segments.size(); ++c) {
    const auto& seg = set.segments[c];
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& f : seg.factors) dims.push_back({f.dim, f.sign});
    segments.push_back({{"segment_id", c},
                        {"descriptor", seg.descriptor},
                        {"member_items", seg.members},
                        {"latent_dims", dims}});
  }
  nlohmann::json j;
  j["tau"] = set.tau;
  j["segments"] = segments;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write segments: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace celsa
