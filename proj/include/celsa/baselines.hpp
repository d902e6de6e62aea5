#pragma once

#include "celsa/interactions.hpp"
#include "celsa/types.hpp"

#include <vector>

namespace celsa {

struct EaseWeights {
  Mat B;        // n x n item-to-item weights, zero diagonal, float32 storage
  DMat B_full;  // the double-precision solve result B is truncated from
  double lambda = 0.0;
};

// Closed-form EASE: P = (X^T X + lambda I)^-1, B = I - P diag(1/diag(P)),
// diagonal zeroed exactly. Solve in double, storage in single precision.
EaseWeights ease_fit(const InteractionMatrix& X, double lambda);

// Row-wise absolute top-k, same tie rule as the sparsifier; no
// renormalization.
SpMatR prune_rows(const EaseWeights& weights, int k);

Vec ease_predict(const std::vector<int>& x_items, const Mat& B);
Vec ease_predict(const std::vector<int>& x_items, const SpMatR& B_pruned);

// Per-item interaction counts; the floor baseline.
Vec popularity_scores(const InteractionMatrix& X_train);

}  // namespace celsa
