#include "celsa/elsa.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace celsa {

void ElsaConfig::validate() const {
  if (d < 1) throw std::invalid_argument("ElsaConfig: d must be >= 1");
  if (epochs < 1) throw std::invalid_argument("ElsaConfig: epochs must be >= 1");
  if (batch_size < 1) {
    throw std::invalid_argument("ElsaConfig: batch_size must be >= 1");
  }
}

ElsaModel init_model(Index n_items, const ElsaConfig& config) {
  config.validate();
  if (n_items < 1) throw std::invalid_argument("init_model: n_items must be >= 1");
  ElsaModel model;
  model.config = config;
  model.A.resize(n_items, config.d);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<float> gauss(
      0.0f, 1.0f / std::sqrt(static_cast<float>(config.d)));
  for (Index i = 0; i < model.A.rows(); ++i) {
    for (Index j = 0; j < model.A.cols(); ++j) {
      model.A(i, j) = gauss(rng);
    }
  }
  row_l2_normalize(model.A);
  model.init_snapshot = model.A;
  return model;
}

Vec predict_scores(const std::vector<int>& x_items, const Mat& A_bar) {
  for (int i : x_items) {
    if (i < 0 || i >= A_bar.rows()) {
      throw std::out_of_range("predict_scores: item index " +
                              std::to_string(i) + " out of range");
    }
  }
  Vec z = Vec::Zero(A_bar.cols());
  for (int i : x_items) z += A_bar.row(i).transpose();
  Vec scores = A_bar * z;
  for (int i : x_items) scores[i] -= 1.0f;
  return scores;
}

double nmse_loss(const Mat& pred, const Mat& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw std::invalid_argument("nmse_loss: shape mismatch");
  }
  double loss = 0.0;
  for (Index r = 0; r < pred.rows(); ++r) {
    const double np = pred.row(r).cast<double>().norm();
    const double nt = target.row(r).cast<double>().norm();
    DVec p = np > kNormEps
                 ? (pred.row(r).cast<double>() / np).transpose().eval()
                 : DVec::Zero(pred.cols()).eval();
    DVec t = nt > kNormEps
                 ? (target.row(r).cast<double>() / nt).transpose().eval()
                 : DVec::Zero(pred.cols()).eval();
    loss += (p - t).squaredNorm();
  }
  return loss / static_cast<double>(pred.rows());
}

double run_training_epoch(Mat& A, const InteractionMatrix& X,
                          const ElsaConfig& config, AdamState& adam,
                          std::mt19937_64& batch_rng, const Mat* mask) {
  std::vector<Index> order(static_cast<size_t>(X.n_users));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), batch_rng);

  double epoch_loss = 0.0;
  Index seen = 0;
  Mat grad;
  for (size_t start = 0; start < order.size();
       start += static_cast<size_t>(config.batch_size)) {
    const size_t end =
        std::min(order.size(), start + static_cast<size_t>(config.batch_size));
    const auto batch = static_cast<Index>(end - start);
    Mat Xb = Mat::Zero(batch, X.n_items);
    for (size_t b = start; b < end; ++b) {
      for (int item : X.rows[static_cast<size_t>(order[b])]) {
        Xb(static_cast<Index>(b - start), item) = 1.0f;
      }
    }
    const double loss = elsa_batch_loss_grad<Scalar>(A, Xb, &grad);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite loss at step " +
                               std::to_string(adam.step + 1));
    }
    if (mask != nullptr) grad = grad.cwiseProduct(*mask);
    adam_step(A, grad, adam);
    if (mask != nullptr) A = A.cwiseProduct(*mask);
    row_l2_normalize(A);
    epoch_loss += loss * static_cast<double>(batch);
    seen += batch;
  }
  return epoch_loss / static_cast<double>(seen);
}

std::vector<EpochStats> train_dense(ElsaModel& model,
                                    const InteractionMatrix& X_train,
                                    const ValidationCallback& validation) {
  model.config.validate();
  if (model.A.rows() != X_train.n_items) {
    throw std::invalid_argument("train_dense: item count mismatch");
  }
  AdamState adam = AdamState::init(model.A.rows(), model.A.cols(),
                                   model.config.learning_rate,
                                   model.config.beta1, model.config.beta2,
                                   model.config.adam_epsilon);
  std::mt19937_64 batch_rng(model.config.seed + 1);
  std::vector<EpochStats> stats;
  stats.reserve(static_cast<size_t>(model.config.epochs));
  for (int epoch = 0; epoch < model.config.epochs; ++epoch) {
    EpochStats s;
    s.loss = run_training_epoch(model.A, X_train, model.config, adam,
                                batch_rng, nullptr);
    if (validation) s.val_metric = validation(model.A);
    stats.push_back(s);
  }
  return stats;
}

}  // namespace celsa
