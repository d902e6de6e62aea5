#pragma once

#include "celsa/types.hpp"

#include <stdexcept>
#include <vector>

namespace celsa {

inline constexpr double kNormEps = 1e-12;

// Sparse-dense product y = M * v. Per-entry accumulation in double.
Vec spmv(const SpMatR& M, const Vec& v);
Vec spmv(const SpMatC& M, const Vec& v);

struct NormalizeReport {
  Index zero_rows = 0;
  std::vector<Index> zero_row_indices;
};

// Scales each row to unit l2 norm. Rows with norm <= eps are left as zero
// and reported, not treated as errors.
NormalizeReport row_l2_normalize(Mat& M, double eps = kNormEps);
NormalizeReport row_l2_normalize(SpMatR& M, double eps = kNormEps);

struct AdamState {
  Mat first_moment;
  Mat second_moment;
  long step = 0;
  float learning_rate = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;

  static AdamState init(Index rows, Index cols, float lr, float b1, float b2,
                        float eps);
  void reset_moments();
};

// Bias-corrected Adam update in place. Throws on non-finite gradients.
void adam_step(Mat& params, const Mat& grads, AdamState& state);

}  // namespace celsa
