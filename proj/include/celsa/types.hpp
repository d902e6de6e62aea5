#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>

namespace celsa {

// Single-precision storage throughout; kernels accumulate in double.
using Scalar = float;

template <typename S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Mat = MatT<Scalar>;
using Vec = VecT<Scalar>;
using DMat = MatT<double>;
using DVec = VecT<double>;

using SpMatR = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;  // CSR
using SpMatC = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;  // CSC

using Index = Eigen::Index;

}  // namespace celsa
