#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cegan/datagen/dataset.hpp"

namespace cegan {

// Latent-confounder toy problem: z_ij ~ N(3(mu_i - 1), 1) with mu_i ~ Bern(0.5)
// shared across the d coordinates of subject i; x = z + N(0, zeta^2 I);
// t ~ Bern(sigmoid(0.25 z_{i,d})); y(t) = sigmoid(1'z + 2t - 1).
struct ToyGenConfig {
  std::size_t n = 5000;
  std::size_t dim = 5;  // d_z == d_x
  double zeta = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

Dataset generate_toy(const ToyGenConfig& config);

enum class ProxyScheme { kGestatScalar, kGestat10OneHot };
std::string to_string(ProxyScheme scheme);
ProxyScheme parse_proxy_scheme(const std::string& name);

// Twins-like semi-synthetic records around a latent gestation variable.
//
// Gestation is drawn Beta(a, b) and min-max normalised to g in [0, 1]; its
// ten-level version is min(9, floor(10 g)). The base features are noisy
// views of g (even columns continuous, odd columns binary).
//   scalar scheme: t ~ Bern(sigmoid(w g)), w ~ N(w_mean, w_std^2)
//   one-hot scheme: x gains `replicas` copies of one-hot(category) with each
//     bit flipped independently with probability p, and
//     t ~ Bern(sigmoid(w_o'x + w_h (category/10 - 0.1))),
//     w_o ~ N(0, w_o_variance I), w_h ~ N(w_h_mean, w_h_variance)
// Outcomes: y(t) ~ Bern(sigmoid(slope * g + bias_t)), drawn independently
// for both arms. With latent_confounding the gestation column(s) are left out
// of x; z_true always holds (g, category).
struct TwinsLikeConfig {
  std::size_t n = 5000;
  std::size_t base_features = 20;
  ProxyScheme scheme = ProxyScheme::kGestatScalar;
  double w_mean = 10.0;
  double w_std = 0.1;
  double flip_probability = 0.1;
  std::size_t replicas = 3;
  double w_o_variance = 0.1;
  double w_h_mean = 9.0;
  double w_h_variance = 0.1;
  bool latent_confounding = true;
  double outcome_slope = -4.0;
  double outcome_bias0 = -1.0;
  double outcome_bias1 = -1.35;
  double gestation_beta_a = 1.0;
  double gestation_beta_b = 9.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Everything a twins-like draw produced, for frequency diagnostics.
struct TwinsLikeDraw {
  Dataset data;
  Vector gestation;               // normalised, in [0, 1]
  std::vector<int> category;      // 0..9
  std::vector<Matrix> replicas;   // n x 10 each (one-hot scheme only)
  double w = 0.0;                 // scalar scheme
  RowVector w_o;                  // one-hot scheme
  double w_h = 0.0;               // one-hot scheme
};

TwinsLikeDraw generate_twins_like_detailed(const TwinsLikeConfig& config);
Dataset generate_twins_like(const TwinsLikeConfig& config);

}  // namespace cegan
