#include "cegan/model/losses.hpp"

#include <cmath>
#include <string>

#include "cegan/numerics/errors.hpp"

namespace cegan {
namespace {

double binary_term(double a, double b, double* grad) {
  const double raw = b;
  const double p = clamp_probability(b);
  if (grad != nullptr) {
    const bool clamped = raw < kProbabilityFloor || raw > 1.0 - kProbabilityFloor;
    *grad = clamped ? 0.0 : -a / p + (1.0 - a) / (1.0 - p);
  }
  return -a * std::log(p) - (1.0 - a) * std::log(1.0 - p);
}

}  // namespace

double elementwise_loss(std::span<const double> target, std::span<const double> prediction, FeatureKind kind) {
  if (target.size() != prediction.size()) {
    throw ShapeError("elementwise_loss: length " + std::to_string(target.size()) + " vs " +
                     std::to_string(prediction.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (kind == FeatureKind::kContinuous) {
      const double d = target[i] - prediction[i];
      total += d * d;
    } else {
      total += binary_term(target[i], prediction[i], nullptr);
    }
  }
  return total;
}

RowLoss row_loss(const Matrix& target, const Matrix& prediction, std::span<const FeatureKind> kinds) {
  if (target.rows() != prediction.rows() || target.cols() != prediction.cols()) {
    throw ShapeError("row_loss: target/prediction shape mismatch");
  }
  if (static_cast<std::size_t>(target.cols()) != kinds.size()) {
    throw ShapeError("row_loss: kinds length does not match column count");
  }
  RowLoss out{Vector::Zero(target.rows()), Matrix(target.rows(), target.cols())};
  for (Eigen::Index r = 0; r < target.rows(); ++r) {
    double row = 0.0;
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
      const double a = target(r, c);
      const double b = prediction(r, c);
      if (kinds[c] == FeatureKind::kContinuous) {
        row += (a - b) * (a - b);
        out.gradient(r, c) = 2.0 * (b - a);
      } else {
        double g = 0.0;
        row += binary_term(a, b, &g);
        out.gradient(r, c) = g;
      }
    }
    out.per_row(r) = row;
  }
  return out;
}

Vector reconstruction_loss(const Matrix& x, const Vector& t, const Matrix& y, const Reconstruction& recon,
                           const DataSchema& schema) {
  const FeatureKind treatment_kind[] = {FeatureKind::kBinary};
  Vector total = row_loss(x, recon.x_bar, schema.x_kinds).per_row;
  total += row_loss(as_column(t), as_column(recon.t_bar), treatment_kind).per_row;
  total += row_loss(y, recon.y_bar, schema.y_kinds).per_row;
  return total;
}

Vector prediction_loss(const Matrix& y, const Matrix& y_hat, const DataSchema& schema) {
  return row_loss(y, y_hat, schema.y_kinds).per_row;
}

Vector value_from_probabilities(const Vector& p_encoder, const Vector& p_decoder) {
  if (p_encoder.size() != p_decoder.size()) throw ShapeError("value_function: batch size mismatch");
  Vector v(p_encoder.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = std::log(clamp_probability(p_encoder(i))) + std::log(1.0 - clamp_probability(p_decoder(i)));
  }
  return v;
}

double binary_cross_entropy(const Vector& labels, const Vector& probabilities) {
  if (labels.size() != probabilities.size()) throw ShapeError("binary_cross_entropy: size mismatch");
  if (labels.size() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) total += binary_term(labels(i), probabilities(i), nullptr);
  return total / static_cast<double>(labels.size());
}

}  // namespace cegan
