#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cegan/datagen/dataset.hpp"
#include "cegan/model/cegan_model.hpp"
#include "cegan/numerics/adam.hpp"
#include "cegan/training/objectives.hpp"

namespace cegan {

struct TrainConfig {
  std::size_t batch_reconstruction = 64;  // k_r
  std::size_t batch_discriminator = 64;   // k_d
  std::size_t batch_generator = 64;       // k_g
  std::size_t batch_propensity = 64;
  AdamConfig adam;
  double alpha = 1.0;
  std::size_t max_iterations = 10000;
  // Validation L_P is evaluated every `eval_every` iterations; training stops
  // after `patience` evaluations without improvement.
  std::size_t eval_every = 100;
  std::size_t patience = 20;
  std::uint64_t seed = 0;
  std::size_t disc_steps_per_iter = 1;
  std::size_t gen_steps_per_iter = 1;
  GeneratorLoss generator_loss = GeneratorLoss::kSaturating;

  void validate() const;
  nlohmann::json to_json() const;
  std::string fingerprint() const;
};

std::string to_string(GeneratorLoss mode);
GeneratorLoss parse_generator_loss(const std::string& name);

struct TraceRecord {
  std::size_t iteration = 0;
  double l_r = 0.0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double p_loss = 0.0;
  double val_l_p = 0.0;  // most recent validation value
  bool operator==(const TraceRecord&) const = default;
};

struct Evaluation {
  std::size_t iteration = 0;
  double val_l_p = 0.0;
  bool operator==(const Evaluation&) const = default;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  std::vector<Evaluation> evaluations;
  std::size_t best_iteration = 0;
  double best_val_l_p = 0.0;
  bool stopped_early = false;
  std::uint64_t stream_key = 0;
  double wall_seconds = 0.0;  // metadata; excluded from comparisons

  bool operator==(const TrainTrace& o) const {
    return records == o.records && evaluations == o.evaluations && best_iteration == o.best_iteration &&
           best_val_l_p == o.best_val_l_p && stopped_early == o.stopped_early && stream_key == o.stream_key;
  }
  // Header iter,l_r,d_loss,g_loss,val_l_p; one row per iteration.
  void write_csv(std::ostream& out) const;
};

// Thrown when a loss or gradient goes non-finite; carries the trace so far.
class TrainingDiverged : public DivergenceError {
 public:
  TrainingDiverged(const std::string& what, TrainTrace trace)
      : DivergenceError(what), trace_(std::move(trace)) {}
  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

// Single optimisation steps. Each samples its draws from rng, updates only
// its own parameter groups, and returns the pre-update batch loss.
double train_reconstruction_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam);
double train_discriminator_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam);
double train_generator_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam, double alpha,
                            GeneratorLoss mode = GeneratorLoss::kSaturating);
double train_propensity_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam);
double train_prediction_step(CeganModel& model, const Batch& batch, Rng& rng, const AdamConfig& adam);

// Mean L_P of f_P(f_I(x, t)) on data with dropout off and noise drawn from
// a stream keyed by `seed`.
double validation_prediction_loss(const CeganModel& model, const Dataset& data, std::uint64_t seed);

struct FitResult {
  CeganModel model;
  TrainTrace trace;
};

// Alternates reconstruction, discriminator, generator and propensity steps;
// returns the parameters with the best validation L_P.
FitResult fit(const Dataset& train, const Dataset& valid, const TrainConfig& config, const ModelConfig& model_config);

// The same loop reduced to f_I/f_P trained on L_P alone (plus the propensity
// model); alpha is never read.
FitResult fit_prediction_only(const Dataset& train, const Dataset& valid, const TrainConfig& config,
                              const ModelConfig& model_config);

}  // namespace cegan
