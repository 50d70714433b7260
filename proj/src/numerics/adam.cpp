#include "cegan/numerics/adam.hpp"

#include <cmath>

namespace cegan {

void AdamConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ValidationError("adam: learning_rate must be >= 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ValidationError("adam: beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ValidationError("adam: beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ValidationError("adam: epsilon must be > 0");
}

void adam_step(NetworkParams& params, const NetworkGradients& gradients, const AdamConfig& config) {
  if (gradients.layers.size() != params.layers.size()) throw ShapeError("adam_step: layer count mismatch");
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    require_shape(gradients.layers[i].weight, params.layers[i].weight.rows(),
                  params.layers[i].weight.cols(), "adam_step weight gradient");
    require_shape(gradients.layers[i].bias, 1, params.layers[i].bias.size(), "adam_step bias gradient");
  }
  if (!gradients.all_finite()) throw DivergenceError("adam_step: non-finite gradient");

  params.adam_t += 1;
  const double t = static_cast<double>(params.adam_t);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseAbs2();
    auto m_hat = m.array() / correction1;
    auto v_hat = v.array() / correction2;
    theta.array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weight, params.adam_m[i].weight, params.adam_v[i].weight,
           gradients.layers[i].weight);
    update(params.layers[i].bias, params.adam_m[i].bias, params.adam_v[i].bias,
           gradients.layers[i].bias);
  }
  params.version += 1;
}

}  // namespace cegan
