#pragma once

#include <cstdint>

#include "cegan/datagen/dataset.hpp"
#include "cegan/model/cegan_model.hpp"

namespace cegan {

// Mean squared error of per-subject effects:
//   (1/N) sum ((y1 - y0) - (y1_hat - y0_hat))^2
// Matrix arguments are averaged over every entry. Throws ShapeError on
// mismatched or empty inputs.
double pehe(const Vector& y1, const Vector& y0, const Vector& y1_hat, const Vector& y0_hat);
double pehe(const Matrix& y1, const Matrix& y0, const Matrix& y1_hat, const Matrix& y0_hat);

// |mean(y1 - y0) - mean(y1_hat - y0_hat)|
double ate_error(const Vector& y1, const Vector& y0, const Vector& y1_hat, const Vector& y0_hat);
double ate_error(const Matrix& y1, const Matrix& y0, const Matrix& y1_hat, const Matrix& y0_hat);

// Mean discriminator output on encoder tuples (z_hat, x, t, y) and on decoder
// tuples (z, x, t, y_hat), dropout off. Both sit at 1/2 at the saddle point.
struct DiscriminatorBalance {
  double encoder_mean = 0.0;
  double decoder_mean = 0.0;
};

DiscriminatorBalance discriminator_balance(const CeganModel& model, const Dataset& data, std::uint64_t seed);

}  // namespace cegan
