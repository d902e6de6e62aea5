#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "celsa/baselines.hpp"

#include <Eigen/Dense>

#include <random>

using namespace celsa;

namespace {

InteractionMatrix random_interactions(Index users, Index items,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  InteractionMatrix X;
  X.n_users = users;
  X.n_items = items;
  for (Index u = 0; u < users; ++u) {
    std::vector<int> row;
    for (Index i = 0; i < items; ++i) {
      if (coin(rng) < 0.3) row.push_back(static_cast<int>(i));
    }
    X.rows.push_back(row);
  }
  return X;
}

// Independent oracle: full dense inverse via LU, straight from the closed
// form, no shared code with ease_fit.
DMat ease_oracle(const InteractionMatrix& X, double lambda) {
  DMat Xd = DMat::Zero(X.n_users, X.n_items);
  for (Index u = 0; u < X.n_users; ++u) {
    for (int i : X.rows[static_cast<size_t>(u)]) Xd(u, i) = 1.0;
  }
  DMat G = Xd.transpose() * Xd +
           lambda * DMat::Identity(X.n_items, X.n_items);
  DMat P = G.fullPivLu().inverse();
  DMat B = DMat::Identity(X.n_items, X.n_items) -
           P * P.diagonal().cwiseInverse().asDiagonal().toDenseMatrix();
  return B;
}

}  // namespace

TEST_CASE("ease_fit matches the independent solve oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto X = random_interactions(15, 8, seed);
    for (double lambda : {1.0, 100.0}) {
      auto w = ease_fit(X, lambda);
      DMat oracle = ease_oracle(X, lambda);
      oracle.diagonal().setZero();
      CHECK((w.B.cast<double>() - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("ease_fit toy instance against the oracle at tight tolerance") {
  InteractionMatrix X;
  X.n_users = 2;
  X.n_items = 3;
  X.rows = {{1}, {0, 1}};
  auto w = ease_fit(X, 1.0);
  DMat oracle = ease_oracle(X, 1.0);
  oracle.diagonal().setZero();
  // compare in double before the float32 storage rounding
  CHECK((w.B.cast<double>() - oracle).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(w.B.diagonal().cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("ease diagonal is exactly zero") {
  auto X = random_interactions(20, 10, 9);
  for (double lambda : {0.5, 10.0, 1000.0}) {
    auto w = ease_fit(X, lambda);
    CHECK(w.B.diagonal().cwiseAbs().maxCoeff() == 0.0f);
  }
}

TEST_CASE("huge lambda drives B to zero") {
  auto X = random_interactions(20, 10, 4);
  auto w = ease_fit(X, 1e6);
  CHECK(w.B.cwiseAbs().maxCoeff() < 1e-3f);
}

TEST_CASE("ease_fit rejects non-positive lambda") {
  auto X = random_interactions(5, 4, 2);
  CHECK_THROWS_AS(ease_fit(X, 0.0), std::invalid_argument);
}

TEST_CASE("prune_rows keeps the k largest magnitudes, no renormalization") {
  EaseWeights w;
  w.B = Mat::Zero(3, 3);
  w.B(0, 1) = 0.5f;
  w.B(0, 2) = -0.9f;
  w.B(1, 0) = 0.3f;
  auto pruned = prune_rows(w, 1);
  CHECK(pruned.coeff(0, 2) == -0.9f);
  CHECK(pruned.coeff(0, 1) == 0.0f);
  CHECK(pruned.coeff(1, 0) == 0.3f);
  for (Index i = 0; i < pruned.outerSize(); ++i) {
    Index nnz = 0;
    for (SpMatR::InnerIterator it(pruned, i); it; ++it) ++nnz;
    CHECK(nnz <= 1);
  }
}

TEST_CASE("prune_rows with k >= n equals dense predictions") {
  auto X = random_interactions(12, 6, 7);
  auto w = ease_fit(X, 10.0);
  auto pruned = prune_rows(w, 6);
  std::vector<int> items = {0, 3, 5};
  Vec dense = ease_predict(items, w.B);
  Vec sparse = ease_predict(items, pruned);
  CHECK((dense - sparse).cwiseAbs().maxCoeff() < 1e-6f);
}

TEST_CASE("ease_predict basics and the dense matvec oracle") {
  auto X = random_interactions(12, 6, 3);
  auto w = ease_fit(X, 5.0);
  CHECK(ease_predict({}, w.B).cwiseAbs().maxCoeff() == 0.0f);

  std::vector<int> items = {1, 4};
  Vec x = Vec::Zero(6);
  x[1] = 1.0f;
  x[4] = 1.0f;
  Vec oracle = w.B.transpose() * x;
  CHECK((ease_predict(items, w.B) - oracle).cwiseAbs().maxCoeff() < 1e-6f);
  CHECK_THROWS_AS(ease_predict({6}, w.B), std::out_of_range);
}

TEST_CASE("popularity_scores matches a column-sum oracle") {
  auto X = random_interactions(30, 8, 6);
  Vec pop = popularity_scores(X);
  for (Index j = 0; j < 8; ++j) {
    int count = 0;
    for (const auto& row : X.rows) {
      count += static_cast<int>(
          std::count(row.begin(), row.end(), static_cast<int>(j)));
    }
    CHECK(pop[j] == static_cast<float>(count));
  }
  Index best;
  pop.maxCoeff(&best);
  auto top = pop;
  CHECK(top[best] == pop.maxCoeff());
}
