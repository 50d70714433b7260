#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cegan/training/objectives.hpp"

namespace cegan {

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 7;
  std::size_t batch_rows = 8;
  // Test hook: perturb the analytic gradient of this group's first layer.
  std::optional<ParamGroup> corrupt_group;
};

struct GradcheckEntry {
  std::string objective;
  std::string schema;
  ParamGroup group = ParamGroup::kEncoder;
  std::size_t layer = 0;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  bool passed = true;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double seconds = 0.0;

  bool passed() const;
  // Largest error over all entries of a group (0 when the group was never checked).
  double max_error(ParamGroup group) const;
};

// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
double gradient_relative_error(double analytic, double numeric);

using ObjectiveFn = std::function<ObjectiveValue(const CeganModel&)>;

// Central differences of fn's loss against its analytic gradients, for every
// parameter of every group fn reports a gradient for.
std::vector<GradcheckEntry> check_objective(const std::string& name, CeganModel model, const ObjectiveFn& fn,
                                            const GradcheckOptions& options);

// Every training loss (L_R, -V, V + alpha L_P in both generator modes, L_P
// alone, propensity cross-entropy) on tiny models (hidden [4, 4], d_z = 2)
// over binary and continuous schemas.
GradcheckReport run_gradcheck(const GradcheckOptions& options = {});

}  // namespace cegan
