#include "cegan/eval/metrics.hpp"

#include <cmath>

namespace cegan {
namespace {

void check_lengths(Eigen::Index a, Eigen::Index b, Eigen::Index c, Eigen::Index d, const char* what) {
  if (a != b || a != c || a != d) throw ShapeError(std::string(what) + ": length mismatch");
  if (a == 0) throw ShapeError(std::string(what) + ": empty input");
}

template <typename T>
double pehe_impl(const T& y1, const T& y0, const T& y1_hat, const T& y0_hat) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y1.size(); ++i) {
    const double e = (y1(i) - y0(i)) - (y1_hat(i) - y0_hat(i));
    sum += e * e;
  }
  return sum / static_cast<double>(y1.size());
}

template <typename T>
double ate_impl(const T& y1, const T& y0, const T& y1_hat, const T& y0_hat) {
  double truth = 0.0;
  double est = 0.0;
  for (Eigen::Index i = 0; i < y1.size(); ++i) {
    truth += y1(i) - y0(i);
    est += y1_hat(i) - y0_hat(i);
  }
  const double n = static_cast<double>(y1.size());
  return std::abs(truth / n - est / n);
}

void check_matrices(const Matrix& y1, const Matrix& y0, const Matrix& y1_hat, const Matrix& y0_hat,
                    const char* what) {
  check_lengths(y1.rows(), y0.rows(), y1_hat.rows(), y0_hat.rows(), what);
  check_lengths(y1.cols(), y0.cols(), y1_hat.cols(), y0_hat.cols(), what);
}

}  // namespace

double pehe(const Vector& y1, const Vector& y0, const Vector& y1_hat, const Vector& y0_hat) {
  check_lengths(y1.size(), y0.size(), y1_hat.size(), y0_hat.size(), "pehe");
  return pehe_impl(y1, y0, y1_hat, y0_hat);
}

double pehe(const Matrix& y1, const Matrix& y0, const Matrix& y1_hat, const Matrix& y0_hat) {
  check_matrices(y1, y0, y1_hat, y0_hat, "pehe");
  return pehe_impl(y1.reshaped(), y0.reshaped(), y1_hat.reshaped(), y0_hat.reshaped());
}

double ate_error(const Vector& y1, const Vector& y0, const Vector& y1_hat, const Vector& y0_hat) {
  check_lengths(y1.size(), y0.size(), y1_hat.size(), y0_hat.size(), "ate_error");
  return ate_impl(y1, y0, y1_hat, y0_hat);
}

double ate_error(const Matrix& y1, const Matrix& y0, const Matrix& y1_hat, const Matrix& y0_hat) {
  check_matrices(y1, y0, y1_hat, y0_hat, "ate_error");
  return ate_impl(y1.reshaped(), y0.reshaped(), y1_hat.reshaped(), y0_hat.reshaped());
}

DiscriminatorBalance discriminator_balance(const CeganModel& model, const Dataset& data, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix z_hat = encode(model, data.x, data.t, data.y, rng);
  const Matrix z = infer_z(model, data.x, data.t, rng);
  const Matrix y_hat = predict_y(model, z, data.x, data.t, rng);
  DiscriminatorBalance out;
  out.encoder_mean = discriminate(model, z_hat, data.x, data.t, data.y).mean();
  out.decoder_mean = discriminate(model, z, data.x, data.t, y_hat).mean();
  return out;
}

}  // namespace cegan
