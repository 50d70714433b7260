#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "cegan/datagen/dataset.hpp"
#include "cegan/model/cegan_model.hpp"

namespace cegan {

struct Batch {
  Matrix x;
  Vector t;
  Matrix y;

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
};

Batch make_batch(const Dataset& data, std::span<const std::size_t> rows);
Batch full_batch(const Dataset& data);
// k rows drawn uniformly with replacement.
Batch sample_batch(const Dataset& data, std::size_t k, Rng& rng);

// Every random quantity one optimization step consumes. Holding them fixed
// turns each objective into a deterministic function of the parameters.
struct StepDraws {
  Matrix eps_encoder;
  Matrix eps_inference;
  Matrix eps_predictor;
  Matrix corruption;  // additive noise on the encoder's (x, t, y) block
  DropoutMasks encoder;
  DropoutMasks inference;
  DropoutMasks predictor;
  DropoutMasks reconstructor;
  DropoutMasks disc_encoder_tuple;
  DropoutMasks disc_decoder_tuple;
  DropoutMasks propensity;
};

// Which objective the draws are for; only the quantities it reads are drawn.
enum class StepKind { kAll, kReconstruction, kAdversarial, kPrediction, kPropensity };

// training=false yields empty masks (dropout off) but still draws noise.
StepDraws draw_step(const CeganModel& model, std::size_t rows, Rng& rng, StepKind kind = StepKind::kAll,
                    bool training = true);

struct GroupGradients {
  std::array<std::optional<NetworkGradients>, kNumParamGroups> by_group;

  std::optional<NetworkGradients>& operator[](ParamGroup g) { return by_group[static_cast<std::size_t>(g)]; }
  const std::optional<NetworkGradients>& operator[](ParamGroup g) const {
    return by_group[static_cast<std::size_t>(g)];
  }
};

struct ObjectiveValue {
  double loss = 0.0;
  GroupGradients gradients;
};

enum class GeneratorLoss { kSaturating, kNonSaturating };

// Batch mean of L_R; gradients for encoder and reconstructor.
ObjectiveValue reconstruction_objective(const CeganModel& model, const Batch& batch, const StepDraws& draws);
// Batch mean of -V; gradients for the discriminator.
ObjectiveValue discriminator_objective(const CeganModel& model, const Batch& batch, const StepDraws& draws);
// Batch mean of V + alpha L_P; gradients for encoder, inference, predictor.
// The non-saturating form replaces log(1 - D(decoder tuple)) by -log D(decoder tuple).
ObjectiveValue generator_objective(const CeganModel& model, const Batch& batch, const StepDraws& draws, double alpha,
                                   GeneratorLoss mode = GeneratorLoss::kSaturating);
// Batch mean of L_P through f_I and f_P alone; gradients for inference, predictor.
ObjectiveValue prediction_objective(const CeganModel& model, const Batch& batch, const StepDraws& draws);
// Mean cross-entropy of t against q(t=1|x); gradients for the propensity net.
ObjectiveValue propensity_objective(const CeganModel& model, const Batch& batch, const StepDraws& draws);

}  // namespace cegan
