#pragma once

#include "celsa/elsa.hpp"
#include "celsa/types.hpp"

#include <string>
#include <vector>

namespace celsa {

// Per-row kept column indices of the absolute top-k; ties go to the lower
// column index.
struct TopKMask {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::vector<int>> kept;  // sorted ascending per row

  Mat to_dense() const;  // 0/1 matrix
};

enum class ScheduleKind { Constant, Linear, Exponential, Stepwise };

// Sequence {k_t}, t = 0..T, from width d down to k nonzeros per row.
struct PruningSchedule {
  ScheduleKind kind = ScheduleKind::Exponential;
  int d = 0;
  int k = 0;
  int T = 0;
  int step_event = 10;  // stepwise: k_t drops from d to k at this event

  void validate() const;
};

ScheduleKind schedule_kind_from_string(const std::string& name);
std::string to_string(ScheduleKind kind);

enum class RestartPolicy { RestartFromInit, Continue };

struct DeadLatentReport {
  Index dead_rows = 0;
  Index dead_columns = 0;
  std::vector<Index> dead_column_indices;
};

struct CompressedModel {
  SpMatR A_bar_s;  // n x d, <= k nonzeros per row, nonzero rows unit-norm
  PruningSchedule schedule;
  RestartPolicy policy = RestartPolicy::RestartFromInit;
  DeadLatentReport dead;
  std::vector<EpochStats> stats;
};

TopKMask topk_mask(const Mat& A, int k);

// mask(A,k) .* A, rows re-normalized; all-zero rows stay zero.
SpMatR sparsify_renormalize(const Mat& A, int k);

int schedule_value(const PruningSchedule& s, int t);

// Recomputes the mask from current |A|; under RestartFromInit, surviving
// entries are reset to the init snapshot and Adam moments cleared. Masked
// entries are zeroed; rows re-normalized.
Mat apply_pruning_event(ElsaModel& model, int k_t, RestartPolicy policy,
                        AdamState& adam);

CompressedModel train_compressed(const InteractionMatrix& X_train,
                                 const ElsaConfig& config,
                                 const PruningSchedule& schedule,
                                 RestartPolicy policy,
                                 const ValidationCallback& validation = nullptr);

DeadLatentReport dead_latent_report(const SpMatR& A_bar_s);

}  // namespace celsa
