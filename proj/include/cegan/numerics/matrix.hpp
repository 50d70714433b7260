#pragma once

#include <cstddef>
#include <initializer_list>
#include <string_view>

#include <Eigen/Dense>

#include "cegan/numerics/errors.hpp"

namespace cegan {

// Dense 64-bit row-major storage used for every batch, weight and gradient.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using Vector = Eigen::VectorXd;

inline constexpr double kProbabilityFloor = 1e-7;

// Clamp a probability into [1e-7, 1 - 1e-7] before it meets a logarithm.
inline double clamp_probability(double p) {
  return p < kProbabilityFloor ? kProbabilityFloor
         : p > 1.0 - kProbabilityFloor ? 1.0 - kProbabilityFloor
                                       : p;
}

double sigmoid(double v);

bool all_finite(const Matrix& m);

// Throws ShapeError naming `what` unless m is rows x cols.
void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, std::string_view what);

// Horizontal concatenation; all blocks must share a row count.
Matrix hconcat(std::initializer_list<const Matrix*> blocks);

// Column vector -> n x 1 matrix.
Matrix as_column(const Vector& v);

}  // namespace cegan
