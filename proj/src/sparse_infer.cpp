#include "celsa/sparse_infer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace celsa {

SparseInferenceEngine build_engine(const SpMatR& A_bar_s) {
  SparseInferenceEngine engine;
  engine.n = A_bar_s.rows();
  engine.d = A_bar_s.cols();
  for (Index i = 0; i < A_bar_s.outerSize(); ++i) {
    double sq = 0.0;
    Index nnz = 0;
    for (SpMatR::InnerIterator it(A_bar_s, i); it; ++it) {
      sq += static_cast<double>(it.value()) * static_cast<double>(it.value());
      ++nnz;
    }
    engine.max_row_nnz = std::max(engine.max_row_nnz, nnz);
    if (nnz > 0 && std::abs(std::sqrt(sq) - 1.0) > 1e-4) {
      throw std::invalid_argument(
          "build_engine: row " + std::to_string(i) +
          " is not unit-norm (got " + std::to_string(std::sqrt(sq)) + ")");
    }
  }
  if (A_bar_s.nonZeros() == 0) {
    std::cerr << "warning: building inference engine from an empty embedding "
                 "matrix; all scores will be zero\n";
    engine.empty = true;
  }
  engine.embed_layout = A_bar_s;
  engine.embed_layout.makeCompressed();
  engine.deembed_layout = SpMatC(A_bar_s);
  engine.deembed_layout.makeCompressed();
  return engine;
}

Vec infer_scores(const std::vector<int>& x_items,
                 const SparseInferenceEngine& engine, std::size_t* mac_count) {
  std::size_t macs = 0;
  DVec z = DVec::Zero(engine.d);
  for (int i : x_items) {
    if (i < 0 || i >= engine.n) {
      throw std::out_of_range("infer_scores: item index " + std::to_string(i) +
                              " out of range");
    }
    for (SpMatR::InnerIterator it(engine.embed_layout, i); it; ++it) {
      z[it.col()] += static_cast<double>(it.value());
      ++macs;
    }
  }
  DVec scores = DVec::Zero(engine.n);
  for (Index j = 0; j < engine.d; ++j) {
    if (z[j] == 0.0) continue;
    for (SpMatC::InnerIterator it(engine.deembed_layout, j); it; ++it) {
      scores[it.row()] += static_cast<double>(it.value()) * z[j];
      ++macs;
    }
  }
  for (int i : x_items) scores[i] -= 1.0;
  if (mac_count != nullptr) *mac_count = macs;
  return scores.cast<Scalar>();
}

Vec embed_user(const std::vector<int>& x_items, const SpMatR& A_bar_s) {
  DVec z = DVec::Zero(A_bar_s.cols());
  for (int i : x_items) {
    if (i < 0 || i >= A_bar_s.rows()) {
      throw std::out_of_range("embed_user: item index out of range");
    }
    for (SpMatR::InnerIterator it(A_bar_s, i); it; ++it) {
      z[it.col()] += static_cast<double>(it.value());
    }
  }
  return z.cast<Scalar>();
}

RetrievalResult top_n(const Vec& scores, const std::vector<int>& exclusions,
                      int N) {
  if (N < 1) throw std::invalid_argument("top_n: N must be >= 1");
  std::vector<char> excluded(static_cast<size_t>(scores.size()), 0);
  for (int i : exclusions) {
    if (i >= 0 && i < scores.size()) excluded[static_cast<size_t>(i)] = 1;
  }
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(scores.size()));
  for (int i = 0; i < scores.size(); ++i) {
    if (!excluded[static_cast<size_t>(i)]) idx.push_back(i);
  }
  const auto keep = std::min<size_t>(static_cast<size_t>(N), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(keep),
                    idx.end(), [&](int a, int b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  RetrievalResult result;
  result.requested = N;
  result.items.assign(idx.begin(), idx.begin() + static_cast<long>(keep));
  result.scores.reserve(keep);
  for (int i : result.items) result.scores.push_back(scores[i]);
  return result;
}

std::size_t embedding_bytes_dense(int d) {
  return 4u * static_cast<std::size_t>(d);
}

std::size_t embedding_bytes_sparse(int k) {
  return 8u * static_cast<std::size_t>(k);
}

}  // namespace celsa
