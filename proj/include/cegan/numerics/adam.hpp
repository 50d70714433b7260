#pragma once

#include "cegan/numerics/mlp.hpp"

namespace cegan {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
  bool operator==(const AdamConfig&) const = default;
};

// One bias-corrected Adam update. Throws DivergenceError on non-finite
// gradients and leaves params untouched in that case.
void adam_step(NetworkParams& params, const NetworkGradients& gradients, const AdamConfig& config);

}  // namespace cegan
