#pragma once

#include "celsa/types.hpp"

#include <cstddef>
#include <vector>

namespace celsa {

// Read-only dual-layout view of the sparse embeddings: rows contiguous for
// the embed gather (x^T A_bar_s), columns contiguous for the de-embed
// scatter (A_bar_s z).
struct SparseInferenceEngine {
  SpMatR embed_layout;    // CSR of A_bar_s
  SpMatC deembed_layout;  // CSC of A_bar_s
  Index n = 0;
  Index d = 0;
  Index max_row_nnz = 0;
  bool empty = false;  // all rows dead; queries return zeros
};

struct RetrievalResult {
  std::vector<int> items;
  std::vector<float> scores;
  int requested = 0;
};

// Throws if any nonzero row's norm deviates from 1 by more than 1e-4.
// An all-empty matrix yields an explicit empty engine (warning, not error).
SparseInferenceEngine build_engine(const SpMatR& A_bar_s);

// r_hat = x^T A_bar_s A_bar_s^T - x^T via the two layouts; O(nk).
// mac_count, when non-null, receives the multiply-accumulate count.
Vec infer_scores(const std::vector<int>& x_items,
                 const SparseInferenceEngine& engine,
                 std::size_t* mac_count = nullptr);

// Latent user representation z = sum of interacted item rows; the
// single-copy query path (one CSR layout), also used for segment scoring.
Vec embed_user(const std::vector<int>& x_items, const SpMatR& A_bar_s);

RetrievalResult top_n(const Vec& scores, const std::vector<int>& exclusions,
                      int N);

// Table-style storage accounting, bytes per item.
std::size_t embedding_bytes_dense(int d);   // 4 bytes per latent factor
std::size_t embedding_bytes_sparse(int k);  // 4+4 bytes per nonzero

}  // namespace celsa
