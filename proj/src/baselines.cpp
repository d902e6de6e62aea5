#include "celsa/baselines.hpp"

#include "celsa/sparsifier.hpp"

#include <Eigen/Cholesky>

#include <stdexcept>

namespace celsa {

EaseWeights ease_fit(const InteractionMatrix& X, double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("ease_fit: lambda must be > 0");
  const Index n = X.n_items;
  DMat gram = DMat::Zero(n, n);
  for (const auto& row : X.rows) {
    for (int a : row) {
      for (int b : row) gram(a, b) += 1.0;
    }
  }
  gram.diagonal().array() += lambda;

  Eigen::LLT<DMat> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("ease_fit: Cholesky factorization failed");
  }
  const DMat P = llt.solve(DMat::Identity(n, n));
  DMat B = -P * P.diagonal().cwiseInverse().asDiagonal();
  B.diagonal().setZero();

  EaseWeights weights;
  weights.lambda = lambda;
  weights.B_full = B;
  weights.B = B.cast<Scalar>();
  weights.B.diagonal().setZero();
  return weights;
}

SpMatR prune_rows(const EaseWeights& weights, int k) {
  const TopKMask mask = topk_mask(weights.B, k);
  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (Index i = 0; i < weights.B.rows(); ++i) {
    for (int j : mask.kept[static_cast<size_t>(i)]) {
      if (weights.B(i, j) != 0.0f) {
        triplets.emplace_back(static_cast<int>(i), j, weights.B(i, j));
      }
    }
  }
  SpMatR out(weights.B.rows(), weights.B.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

namespace {
void check_indices(const std::vector<int>& x_items, Index n) {
  for (int i : x_items) {
    if (i < 0 || i >= n) {
      throw std::out_of_range("ease_predict: item index out of range");
    }
  }
}
}  // namespace

Vec ease_predict(const std::vector<int>& x_items, const Mat& B) {
  check_indices(x_items, B.rows());
  DVec scores = DVec::Zero(B.cols());
  for (int i : x_items) scores += B.row(i).cast<double>().transpose();
  return scores.cast<Scalar>();
}

Vec ease_predict(const std::vector<int>& x_items, const SpMatR& B_pruned) {
  check_indices(x_items, B_pruned.rows());
  DVec scores = DVec::Zero(B_pruned.cols());
  for (int i : x_items) {
    for (SpMatR::InnerIterator it(B_pruned, i); it; ++it) {
      scores[it.col()] += static_cast<double>(it.value());
    }
  }
  return scores.cast<Scalar>();
}

Vec popularity_scores(const InteractionMatrix& X_train) {
  Vec counts = Vec::Zero(X_train.n_items);
  for (const auto& row : X_train.rows) {
    for (int item : row) counts[item] += 1.0f;
  }
  return counts;
}

}  // namespace celsa
