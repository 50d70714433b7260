#pragma once

#include <span>

#include "cegan/model/schema.hpp"
#include "cegan/numerics/matrix.hpp"

namespace cegan {

// l(a, b): squared error for continuous columns, cross-entropy with b
// clamped to [1e-7, 1 - 1e-7] for binary columns.
double elementwise_loss(std::span<const double> target, std::span<const double> prediction, FeatureKind kind);

// Row-wise loss over a batch where column c uses kinds[c], together with the
// derivative of each row's loss w.r.t. the prediction matrix.
struct RowLoss {
  Vector per_row;
  Matrix gradient;
};
RowLoss row_loss(const Matrix& target, const Matrix& prediction, std::span<const FeatureKind> kinds);

struct Reconstruction {
  Matrix x_bar;
  Vector t_bar;
  Matrix y_bar;
};

// L_R = l(x, x_bar) + l(t, t_bar) + l(y, y_bar), per row; t always binary.
Vector reconstruction_loss(const Matrix& x, const Vector& t, const Matrix& y, const Reconstruction& recon,
                           const DataSchema& schema);

// L_P = l(y, y_hat), per row.
Vector prediction_loss(const Matrix& y, const Matrix& y_hat, const DataSchema& schema);

// V = log D(encoder tuple) + log(1 - D(decoder tuple)), per row, clamped.
Vector value_from_probabilities(const Vector& p_encoder, const Vector& p_decoder);

// Mean binary cross-entropy of labels against probabilities.
double binary_cross_entropy(const Vector& labels, const Vector& probabilities);

}  // namespace cegan
