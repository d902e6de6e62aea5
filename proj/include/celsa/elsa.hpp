#pragma once

#include "celsa/interactions.hpp"
#include "celsa/linalg.hpp"
#include "celsa/types.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace celsa {

struct ElsaConfig {
  int d = 128;
  int epochs = 20;
  int batch_size = 128;
  float learning_rate = 0.01f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float adam_epsilon = 1e-8f;
  std::uint64_t seed = 42;

  void validate() const;
};

struct ElsaModel {
  Mat A;              // n x d, rows kept unit-norm by projection
  Mat init_snapshot;  // copy of the initial A, for restart policies
  ElsaConfig config;
};

struct EpochStats {
  double loss = 0.0;
  std::optional<double> val_metric;
};

// Seeded Gaussian init (sigma = 1/sqrt(d)) followed by row normalization.
ElsaModel init_model(Index n_items, const ElsaConfig& config);

// r_hat = (x^T A_bar) A_bar^T - x^T, via two matrix-vector products.
Vec predict_scores(const std::vector<int>& x_items, const Mat& A_bar);

// Mean over rows of || normalize(pred_row) - normalize(target_row) ||^2.
// All-zero prediction rows normalize to zero.
double nmse_loss(const Mat& pred, const Mat& target);

// Loss and analytic gradient for a batch: scores = Xb A A^T - Xb, loss as in
// nmse_loss. grad_out, when non-null, receives dLoss/dA (mean over batch).
// Templated so the finite-difference check can run in double.
template <typename S>
double elsa_batch_loss_grad(const MatT<S>& A, const MatT<S>& Xb,
                            MatT<S>* grad_out) {
  const Index batch = Xb.rows();
  const MatT<S> Z = Xb * A;                       // batch x d
  MatT<S> P = Z * A.transpose() - Xb;             // batch x n
  MatT<S> G(batch, P.cols());                     // dLoss/dP
  double loss = 0.0;
  for (Index r = 0; r < batch; ++r) {
    const double np = P.row(r).template cast<double>().norm();
    const double nx = Xb.row(r).template cast<double>().norm();
    VecT<double> xhat = nx > kNormEps
                            ? (Xb.row(r).template cast<double>() / nx)
                                  .transpose()
                                  .eval()
                            : VecT<double>::Zero(P.cols()).eval();
    if (np <= kNormEps) {
      // normalize(0) = 0; constant w.r.t. P on this branch
      loss += xhat.squaredNorm();
      G.row(r).setZero();
      continue;
    }
    const VecT<double> f = P.row(r).template cast<double>().transpose() / np;
    const VecT<double> diff = f - xhat;
    loss += diff.squaredNorm();
    const VecT<double> g = (2.0 / np) * (diff - f * f.dot(diff));
    G.row(r) = g.template cast<S>().transpose();
  }
  loss /= static_cast<double>(batch);
  if (grad_out != nullptr) {
    // d/dA of sum_r loss_r: G^T Z + Xb^T (G A), averaged over the batch
    *grad_out = (G.transpose() * Z + Xb.transpose() * (G * A)) /
                static_cast<S>(batch);
  }
  return loss;
}

using ValidationCallback = std::function<double(const Mat& A_bar)>;

// Mini-batch Adam with per-step row re-normalization. Deterministic for a
// fixed seed: batch order comes from one seeded shuffle stream.
std::vector<EpochStats> train_dense(
    ElsaModel& model, const InteractionMatrix& X_train,
    const ValidationCallback& validation = nullptr);

// Shared epoch driver; mask (n x d of 0/1), when non-null, gates both the
// gradient and the parameters after each step.
double run_training_epoch(Mat& A, const InteractionMatrix& X,
                          const ElsaConfig& config, AdamState& adam,
                          std::mt19937_64& batch_rng, const Mat* mask);

}  // namespace celsa
