#include "cegan/training/trainer.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "cegan/numerics/hash.hpp"

namespace cegan {
namespace {

void apply(CeganModel& model, const ObjectiveValue& value, const AdamConfig& adam, const char* step) {
  if (!std::isfinite(value.loss)) throw DivergenceError(std::string(step) + ": non-finite loss");
  for (ParamGroup g : kAllParamGroups) {
    if (const auto& grad = value.gradients[g]) adam_step(model.group(g).params, *grad, adam);
  }
}

// Stream layout per iteration: child(0) reconstruction, child(100 + k)
// discriminator step k, child(200 + k) generator/prediction step k,
// child(300) propensity.
constexpr std::uint64_t kDiscStream = 100;
constexpr std::uint64_t kGenStream = 200;
constexpr std::uint64_t kPropensityStream = 300;

enum class Mode { kFull, kPredictionOnly };

FitResult run_fit(const Dataset& train, const Dataset& valid, const TrainConfig& config,
                  const ModelConfig& model_config, Mode mode) {
  config.validate();
  if (train.size() == 0 || valid.size() == 0) throw ValidationError("fit: empty train or validation split");
  if (!(train.schema == valid.schema)) throw ValidationError("fit: train/validation schemas differ");

  const auto start = std::chrono::steady_clock::now();
  const Rng root(config.seed);
  Rng init = root.child(0);
  const Rng iterations = root.child(1);
  const std::uint64_t eval_seed = root.child(2).key();

  FitResult result{make_cegan_model(train.schema, model_config, init), {}};
  CeganModel& model = result.model;
  if (model_config.standardize_inputs) model.x_scaler = InputScaler::fit(train.x, train.schema.x_kinds);
  TrainTrace& trace = result.trace;
  trace.stream_key = iterations.key();

  double latest_val = validation_prediction_loss(model, valid, eval_seed);
  trace.evaluations.push_back({0, latest_val});
  trace.best_iteration = 0;
  trace.best_val_l_p = latest_val;
  CeganModel best = model;
  std::size_t since_improvement = 0;

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const Rng step_root = iterations.child(it);
    TraceRecord rec;
    rec.iteration = it;
    try {
      if (mode == Mode::kFull) {
        Rng r = step_root.child(0);
        rec.l_r = train_reconstruction_step(model, sample_batch(train, config.batch_reconstruction, r), r, config.adam);
        for (std::size_t k = 0; k < config.disc_steps_per_iter; ++k) {
          Rng rd = step_root.child(kDiscStream + k);
          rec.d_loss += train_discriminator_step(model, sample_batch(train, config.batch_discriminator, rd), rd,
                                                 config.adam);
        }
        rec.d_loss /= static_cast<double>(config.disc_steps_per_iter);
        for (std::size_t k = 0; k < config.gen_steps_per_iter; ++k) {
          Rng rg = step_root.child(kGenStream + k);
          rec.g_loss += train_generator_step(model, sample_batch(train, config.batch_generator, rg), rg, config.adam,
                                             config.alpha, config.generator_loss);
        }
        rec.g_loss /= static_cast<double>(config.gen_steps_per_iter);
      } else {
        for (std::size_t k = 0; k < config.gen_steps_per_iter; ++k) {
          Rng rg = step_root.child(kGenStream + k);
          rec.g_loss += train_prediction_step(model, sample_batch(train, config.batch_generator, rg), rg, config.adam);
        }
        rec.g_loss /= static_cast<double>(config.gen_steps_per_iter);
      }
      Rng rq = step_root.child(kPropensityStream);
      rec.p_loss = train_propensity_step(model, sample_batch(train, config.batch_propensity, rq), rq, config.adam);
    } catch (const DivergenceError& e) {
      trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      throw TrainingDiverged("training diverged at iteration " + std::to_string(it) + ": " + e.what(), trace);
    }

    const bool evaluate = it % config.eval_every == 0 || it == config.max_iterations;
    if (evaluate) {
      latest_val = validation_prediction_loss(model, valid, eval_seed);
      if (!std::isfinite(latest_val)) {
        throw TrainingDiverged("validation loss non-finite at iteration " + std::to_string(it), trace);
      }
      trace.evaluations.push_back({it, latest_val});
    }
    rec.val_l_p = latest_val;
    trace.records.push_back(rec);

    if (evaluate) {
      if (latest_val < trace.best_val_l_p) {
        trace.best_val_l_p = latest_val;
        trace.best_iteration = it;
        best = model;
        since_improvement = 0;
      } else if (++since_improvement >= config.patience) {
        trace.stopped_early = true;
        break;
      }
    }
  }
  result.model = std::move(best);
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_reconstruction == 0 || batch_discriminator == 0 || batch_generator == 0 || batch_propensity == 0) {
    throw ValidationError("train: minibatch sizes must be >= 1");
  }
  adam.validate();
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("train: alpha must be a finite value >= 0");
  if (eval_every == 0) throw ValidationError("train: eval_every must be >= 1");
  if (patience == 0) throw ValidationError("train: patience must be >= 1");
  if (disc_steps_per_iter == 0 || gen_steps_per_iter == 0) throw ValidationError("train: step ratios must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
  return nlohmann::json{{"batch_reconstruction", batch_reconstruction},
                        {"batch_discriminator", batch_discriminator},
                        {"batch_generator", batch_generator},
                        {"batch_propensity", batch_propensity},
                        {"learning_rate", adam.learning_rate},
                        {"beta1", adam.beta1},
                        {"beta2", adam.beta2},
                        {"epsilon", adam.epsilon},
                        {"alpha", alpha},
                        {"max_iterations", max_iterations},
                        {"eval_every", eval_every},
                        {"patience", patience},
                        {"seed", seed},
                        {"disc_steps_per_iter", disc_steps_per_iter},
                        {"gen_steps_per_iter", gen_steps_per_iter},
                        {"generator_loss", to_string(generator_loss)}};
}

std::string TrainConfig::fingerprint() const { return fingerprint_hex(to_json().dump()); }

std::string to_string(GeneratorLoss mode) {
  return mode == GeneratorLoss::kSaturating ? "saturating" : "non-saturating";
}

GeneratorLoss parse_generator_loss(const std::string& name) {
  if (name == "saturating") return GeneratorLoss::kSaturating;
  if (name == "non-saturating") return GeneratorLoss::kNonSaturating;
  throw ValidationError("unknown generator loss '" + name + "'");
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "iter,l_r,d_loss,g_loss,val_l_p\n";
  char buf[32];
  auto num = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
  };
  for (const auto& r : records) {
    out << r.iteration << ',';
    num(r.l_r);
    out << ',';
    num(r.d_loss);
    out << ',';
    num(r.g_loss);
    out << ',';
    num(r.val_l_p);
    out << '\n';
  }
}

double train_reconstruction_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam) {
  const StepDraws d = draw_step(model, batch.size(), rng, StepKind::kReconstruction);
  const ObjectiveValue v = reconstruction_objective(model, batch, d);
  apply(model, v, adam, "reconstruction step");
  return v.loss;
}

double train_discriminator_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam) {
  const StepDraws d = draw_step(model, batch.size(), rng, StepKind::kAdversarial);
  const ObjectiveValue v = discriminator_objective(model, batch, d);
  apply(model, v, adam, "discriminator step");
  return v.loss;
}

double train_generator_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam, double alpha,
                            GeneratorLoss mode) {
  const StepDraws d = draw_step(model, batch.size(), rng, StepKind::kAdversarial);
  const ObjectiveValue v = generator_objective(model, batch, d, alpha, mode);
  apply(model, v, adam, "generator step");
  return v.loss;
}

double train_propensity_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam) {
  const StepDraws d = draw_step(model, batch.size(), rng, StepKind::kPropensity);
  const ObjectiveValue v = propensity_objective(model, batch, d);
  apply(model, v, adam, "propensity step");
  return v.loss;
}

double train_prediction_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam) {
  const StepDraws d = draw_step(model, batch.size(), rng, StepKind::kPrediction);
  const ObjectiveValue v = prediction_objective(model, batch, d);
  apply(model, v, adam, "prediction step");
  return v.loss;
}

double validation_prediction_loss(const CeganModel& model, const Dataset& data, std::uint64_t seed) {
  Rng rng(seed);
  const Batch b = full_batch(data);
  const StepDraws d = draw_step(model, b.size(), rng, StepKind::kPrediction, /*training=*/false);
  return prediction_objective(model, b, d).loss;
}

FitResult fit(const Dataset& train, const Dataset& valid, const TrainConfig& config, const ModelConfig& model_config) {
  return run_fit(train, valid, config, model_config, Mode::kFull);
}

FitResult fit_prediction_only(const Dataset& train, const Dataset& valid, const TrainConfig& config,
                              const ModelConfig& model_config) {
  return run_fit(train, valid, config, model_config, Mode::kPredictionOnly);
}

}  // namespace cegan
