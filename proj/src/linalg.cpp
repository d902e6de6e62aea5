#include "celsa/linalg.hpp"

#include <cmath>

namespace celsa {

Vec spmv(const SpMatR& M, const Vec& v) {
  if (v.size() != M.cols()) {
    throw std::invalid_argument("spmv: vector length " +
                                std::to_string(v.size()) +
                                " does not match matrix cols " +
                                std::to_string(M.cols()));
  }
  Vec out = Vec::Zero(M.rows());
  for (Index i = 0; i < M.outerSize(); ++i) {
    double acc = 0.0;
    for (SpMatR::InnerIterator it(M, i); it; ++it) {
      acc += static_cast<double>(it.value()) * static_cast<double>(v[it.col()]);
    }
    out[i] = static_cast<Scalar>(acc);
  }
  return out;
}

Vec spmv(const SpMatC& M, const Vec& v) {
  if (v.size() != M.cols()) {
    throw std::invalid_argument("spmv: vector length " +
                                std::to_string(v.size()) +
                                " does not match matrix cols " +
                                std::to_string(M.cols()));
  }
  DVec acc = DVec::Zero(M.rows());
  for (Index j = 0; j < M.outerSize(); ++j) {
    const double vj = static_cast<double>(v[j]);
    if (vj == 0.0) continue;
    for (SpMatC::InnerIterator it(M, j); it; ++it) {
      acc[it.row()] += static_cast<double>(it.value()) * vj;
    }
  }
  return acc.cast<Scalar>();
}

NormalizeReport row_l2_normalize(Mat& M, double eps) {
  NormalizeReport report;
  for (Index i = 0; i < M.rows(); ++i) {
    const double norm = M.row(i).template cast<double>().norm();
    if (norm > eps) {
      M.row(i) *= static_cast<Scalar>(1.0 / norm);
    } else {
      M.row(i).setZero();
      ++report.zero_rows;
      report.zero_row_indices.push_back(i);
    }
  }
  return report;
}

NormalizeReport row_l2_normalize(SpMatR& M, double eps) {
  NormalizeReport report;
  for (Index i = 0; i < M.outerSize(); ++i) {
    double sq = 0.0;
    for (SpMatR::InnerIterator it(M, i); it; ++it) {
      sq += static_cast<double>(it.value()) * static_cast<double>(it.value());
    }
    const double norm = std::sqrt(sq);
    if (norm > eps) {
      const auto inv = static_cast<Scalar>(1.0 / norm);
      for (SpMatR::InnerIterator it(M, i); it; ++it) {
        it.valueRef() *= inv;
      }
    } else {
      ++report.zero_rows;
      report.zero_row_indices.push_back(i);
    }
  }
  return report;
}

AdamState AdamState::init(Index rows, Index cols, float lr, float b1, float b2,
                          float eps) {
  AdamState state;
  state.first_moment = Mat::Zero(rows, cols);
  state.second_moment = Mat::Zero(rows, cols);
  state.step = 0;
  state.learning_rate = lr;
  state.beta1 = b1;
  state.beta2 = b2;
  state.epsilon = eps;
  return state;
}

void AdamState::reset_moments() {
  first_moment.setZero();
  second_moment.setZero();
  step = 0;
}

void adam_step(Mat& params, const Mat& grads, AdamState& state) {
  if (params.rows() != grads.rows() || params.cols() != grads.cols()) {
    throw std::invalid_argument("adam_step: parameter/gradient shape mismatch");
  }
  if (!grads.allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient at step " +
                             std::to_string(state.step + 1));
  }
  ++state.step;
  const float b1 = state.beta1;
  const float b2 = state.beta2;
  state.first_moment = b1 * state.first_moment + (1.0f - b1) * grads;
  state.second_moment =
      b2 * state.second_moment.array().matrix() +
      (1.0f - b2) * grads.array().square().matrix();
  const double corr1 = 1.0 - std::pow(static_cast<double>(b1), state.step);
  const double corr2 = 1.0 - std::pow(static_cast<double>(b2), state.step);
  const auto m_hat = state.first_moment.array() / static_cast<float>(corr1);
  const auto v_hat = state.second_moment.array() / static_cast<float>(corr2);
  params.array() -=
      state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
}

}  // namespace celsa
