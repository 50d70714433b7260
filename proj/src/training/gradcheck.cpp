#include "cegan/training/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cegan {

double gradient_relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

bool GradcheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const GradcheckEntry& e) { return e.passed; });
}

double GradcheckReport::max_error(ParamGroup group) const {
  double worst = 0.0;
  for (const auto& e : entries) {
    if (e.group == group) worst = std::max(worst, e.max_relative_error);
  }
  return worst;
}

std::vector<GradcheckEntry> check_objective(const std::string& name, CeganModel model, const ObjectiveFn& fn,
                                            const GradcheckOptions& options) {
  ObjectiveValue analytic = fn(model);
  std::vector<GradcheckEntry> out;
  for (ParamGroup g : kAllParamGroups) {
    auto& grad = analytic.gradients[g];
    if (!grad) continue;
    if (options.corrupt_group == g) grad->layers[0].weight(0, 0) += 1e-2 * (1.0 + std::abs(grad->layers[0].weight(0, 0)));

    NetworkParams& params = model.group(g).params;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      GradcheckEntry entry{name, model.schema.describe(), g, l, 0, 0.0, true};
      auto probe = [&](double* value, double analytic_value) {
        const double saved = *value;
        *value = saved + options.step;
        const double up = fn(model).loss;
        *value = saved - options.step;
        const double down = fn(model).loss;
        *value = saved;
        const double numeric = (up - down) / (2.0 * options.step);
        entry.max_relative_error = std::max(entry.max_relative_error, gradient_relative_error(analytic_value, numeric));
        ++entry.checked;
      };
      LayerParams& layer = params.layers[l];
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
        probe(layer.weight.data() + i, grad->layers[l].weight.data()[i]);
      }
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) probe(layer.bias.data() + i, grad->layers[l].bias(i));
      entry.passed = entry.max_relative_error < options.tolerance;
      out.push_back(entry);
    }
  }
  return out;
}

namespace {

Batch random_batch(const DataSchema& schema, std::size_t rows, Rng& rng) {
  Batch b{Matrix(rows, schema.x_dim()), Vector(rows), Matrix(rows, schema.y_dim())};
  auto fill = [&](Matrix& m, const std::vector<FeatureKind>& kinds) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = kinds[c] == FeatureKind::kBinary ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.normal();
      }
    }
  };
  fill(b.x, schema.x_kinds);
  fill(b.y, schema.y_kinds);
  for (std::size_t r = 0; r < rows; ++r) b.t(r) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return b;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ModelConfig config;
  config.set_latent_dim(2);
  config.hidden_dims = {4, 4};
  config.propensity_hidden_dims = {4, 4};
  config.dropout_rate = 0.25;
  config.input_corruption_std = 0.1;

  const std::vector<DataSchema> schemas = {
      DataSchema{{FeatureKind::kContinuous, FeatureKind::kBinary, FeatureKind::kContinuous}, {FeatureKind::kBinary}},
      DataSchema{{FeatureKind::kBinary, FeatureKind::kContinuous}, {FeatureKind::kContinuous, FeatureKind::kContinuous}},
  };

  GradcheckReport report;
  Rng root(options.seed);
  for (std::size_t s = 0; s < schemas.size(); ++s) {
    Rng rng = root.child(s);
    Rng init = rng.child(0);
    CeganModel model = make_cegan_model(schemas[s], config, init);
    // Zero biases put rows whose hidden inputs are all dropped exactly on a
    // ReLU kink, where central differences are meaningless.
    Rng jitter = rng.child(3);
    for (ParamGroup g : kAllParamGroups) {
      for (LayerParams& layer : model.group(g).params.layers) {
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = 0.1 * jitter.normal();
      }
    }
    Rng data_rng = rng.child(1);
    const Batch batch = random_batch(schemas[s], options.batch_rows, data_rng);
    model.x_scaler = InputScaler::fit(batch.x, schemas[s].x_kinds);
    Rng draw_rng = rng.child(2);
    const StepDraws draws = draw_step(model, batch.size(), draw_rng);

    auto add = [&](const std::string& name, const ObjectiveFn& fn) {
      auto entries = check_objective(name, model, fn, options);
      report.entries.insert(report.entries.end(), entries.begin(), entries.end());
    };
    add("reconstruction L_R", [&](const CeganModel& m) { return reconstruction_objective(m, batch, draws); });
    add("discriminator -V", [&](const CeganModel& m) { return discriminator_objective(m, batch, draws); });
    add("generator V+alpha*L_P", [&](const CeganModel& m) {
      return generator_objective(m, batch, draws, 1.0, GeneratorLoss::kSaturating);
    });
    add("generator non-saturating", [&](const CeganModel& m) {
      return generator_objective(m, batch, draws, 0.5, GeneratorLoss::kNonSaturating);
    });
    add("prediction L_P", [&](const CeganModel& m) { return prediction_objective(m, batch, draws); });
    add("propensity cross-entropy", [&](const CeganModel& m) { return propensity_objective(m, batch, draws); });
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cegan
