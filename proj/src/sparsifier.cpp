#include "celsa/sparsifier.hpp"

#include "celsa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace celsa {

Mat TopKMask::to_dense() const {
  Mat M = Mat::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (int j : kept[static_cast<size_t>(i)]) M(i, j) = 1.0f;
  }
  return M;
}

void PruningSchedule::validate() const {
  if (d < 1 || k < 1) throw std::invalid_argument("schedule: d, k must be >= 1");
  if (k > d) throw std::invalid_argument("schedule: k must be <= d");
  if (kind != ScheduleKind::Constant && T < 1) {
    throw std::invalid_argument("schedule: T must be >= 1");
  }
  if (kind == ScheduleKind::Stepwise && step_event < 0) {
    throw std::invalid_argument("schedule: step_event must be >= 0");
  }
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "constant") return ScheduleKind::Constant;
  if (name == "linear") return ScheduleKind::Linear;
  if (name == "exponential") return ScheduleKind::Exponential;
  if (name == "stepwise") return ScheduleKind::Stepwise;
  throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Exponential: return "exponential";
    case ScheduleKind::Stepwise: return "stepwise";
  }
  return "?";
}

TopKMask topk_mask(const Mat& A, int k) {
  if (k < 1) throw std::invalid_argument("topk_mask: k must be >= 1");
  TopKMask mask;
  mask.rows = A.rows();
  mask.cols = A.cols();
  mask.kept.resize(static_cast<size_t>(A.rows()));
  const int keep = std::min<int>(k, static_cast<int>(A.cols()));
  std::vector<int> idx(static_cast<size_t>(A.cols()));
  for (Index i = 0; i < A.rows(); ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                      [&](int a, int b) {
                        const float va = std::abs(A(i, a));
                        const float vb = std::abs(A(i, b));
                        if (va != vb) return va > vb;
                        return a < b;
                      });
    auto& row = mask.kept[static_cast<size_t>(i)];
    row.assign(idx.begin(), idx.begin() + keep);
    std::sort(row.begin(), row.end());
  }
  return mask;
}

SpMatR sparsify_renormalize(const Mat& A, int k) {
  const TopKMask mask = topk_mask(A, k);
  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (Index i = 0; i < A.rows(); ++i) {
    double sq = 0.0;
    for (int j : mask.kept[static_cast<size_t>(i)]) {
      sq += static_cast<double>(A(i, j)) * static_cast<double>(A(i, j));
    }
    const double norm = std::sqrt(sq);
    if (norm <= kNormEps) continue;  // dead row stays empty
    for (int j : mask.kept[static_cast<size_t>(i)]) {
      if (A(i, j) == 0.0f) continue;
      triplets.emplace_back(static_cast<int>(i), j,
                            static_cast<Scalar>(A(i, j) / norm));
    }
  }
  SpMatR out(A.rows(), A.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

int schedule_value(const PruningSchedule& s, int t) {
  s.validate();
  if (t < 0 || (s.kind != ScheduleKind::Constant && t > s.T)) {
    throw std::out_of_range("schedule_value: event index out of range");
  }
  int k_t = s.k;
  switch (s.kind) {
    case ScheduleKind::Constant:
      k_t = s.k;
      break;
    case ScheduleKind::Linear: {
      const double frac = static_cast<double>(t) / static_cast<double>(s.T);
      k_t = static_cast<int>(std::lround(s.d - (s.d - s.k) * frac));
      break;
    }
    case ScheduleKind::Exponential: {
      const double frac = static_cast<double>(t) / static_cast<double>(s.T);
      k_t = static_cast<int>(std::lround(
          s.d * std::pow(static_cast<double>(s.k) / s.d, frac)));
      break;
    }
    case ScheduleKind::Stepwise:
      k_t = t < s.step_event ? s.d : s.k;
      break;
  }
  return std::clamp(k_t, s.k, s.d);
}

Mat apply_pruning_event(ElsaModel& model, int k_t, RestartPolicy policy,
                        AdamState& adam) {
  const TopKMask mask = topk_mask(model.A, k_t);
  if (policy == RestartPolicy::RestartFromInit) {
    if (model.init_snapshot.size() == 0) {
      throw std::runtime_error(
          "apply_pruning_event: restart policy requires an init snapshot");
    }
    model.A = model.init_snapshot;
    adam.reset_moments();
  }
  Mat M = mask.to_dense();
  model.A = model.A.cwiseProduct(M);
  row_l2_normalize(model.A);
  return M;
}

CompressedModel train_compressed(const InteractionMatrix& X_train,
                                 const ElsaConfig& config,
                                 const PruningSchedule& schedule,
                                 RestartPolicy policy,
                                 const ValidationCallback& validation) {
  config.validate();
  schedule.validate();
  if (schedule.d != config.d) {
    throw std::invalid_argument("train_compressed: schedule.d != config.d");
  }
  if (schedule.kind != ScheduleKind::Constant && schedule.T != config.epochs) {
    throw std::invalid_argument(
        "train_compressed: schedule.T must equal config.epochs");
  }

  ElsaModel model = init_model(X_train.n_items, config);
  AdamState adam = AdamState::init(model.A.rows(), model.A.cols(),
                                   config.learning_rate, config.beta1,
                                   config.beta2, config.adam_epsilon);
  std::mt19937_64 batch_rng(config.seed + 1);

  CompressedModel out;
  out.schedule = schedule;
  out.policy = policy;

  // Pruning events sit at epoch boundaries: the event entering epoch e
  // tightens the constraint from k_e to k_{e+1}, so every mask, including
  // the final k_T = k, gets a full epoch of training after it. k_0 = d is
  // the unconstrained starting width and needs no event of its own.
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const int t = schedule.kind == ScheduleKind::Constant
                      ? epoch + 1
                      : std::min(epoch + 1, schedule.T);
    Mat mask = apply_pruning_event(model, schedule_value(schedule, t), policy,
                                   adam);
    EpochStats s;
    s.loss = run_training_epoch(model.A, X_train, config, adam, batch_rng,
                                &mask);
    if (validation) s.val_metric = validation(model.A);
    out.stats.push_back(s);
  }

  out.A_bar_s = sparsify_renormalize(model.A, schedule.k);
  out.dead = dead_latent_report(out.A_bar_s);
  return out;
}

DeadLatentReport dead_latent_report(const SpMatR& A_bar_s) {
  DeadLatentReport report;
  std::vector<char> col_live(static_cast<size_t>(A_bar_s.cols()), 0);
  for (Index i = 0; i < A_bar_s.outerSize(); ++i) {
    bool live = false;
    for (SpMatR::InnerIterator it(A_bar_s, i); it; ++it) {
      if (it.value() != 0.0f) {
        live = true;
        col_live[static_cast<size_t>(it.col())] = 1;
      }
    }
    if (!live) ++report.dead_rows;
  }
  for (Index j = 0; j < A_bar_s.cols(); ++j) {
    if (!col_live[static_cast<size_t>(j)]) {
      ++report.dead_columns;
      report.dead_column_indices.push_back(j);
    }
  }
  return report;
}

}  // namespace celsa
