#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cegan/model/losses.hpp"
#include "cegan/model/schema.hpp"
#include "cegan/numerics/mlp.hpp"
#include "cegan/numerics/rng.hpp"

namespace cegan {

struct ModelConfig {
  std::size_t latent_dim = 20;
  // Widths of the Gaussian noise vectors concatenated to the encoder,
  // inference and prediction subnetwork inputs.
  std::size_t encoder_noise_dim = 20;
  std::size_t inference_noise_dim = 20;
  std::size_t predictor_noise_dim = 20;
  std::vector<std::size_t> hidden_dims{200, 200, 200};
  std::vector<std::size_t> propensity_hidden_dims{200, 200, 200};
  double dropout_rate = 0.6;
  // Std of optional additive Gaussian corruption of the encoder's (x, t, y) input.
  double input_corruption_std = 0.0;
  // Fit an InputScaler on the training split's continuous x columns.
  bool standardize_inputs = true;

  // Sets the latent width and all three noise widths at once.
  ModelConfig& set_latent_dim(std::size_t d);
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

enum class ParamGroup { kEncoder, kInference, kPredictor, kReconstructor, kDiscriminator, kPropensity };
inline constexpr std::size_t kNumParamGroups = 6;
inline constexpr std::array<ParamGroup, kNumParamGroups> kAllParamGroups = {
    ParamGroup::kEncoder,       ParamGroup::kInference,     ParamGroup::kPredictor,
    ParamGroup::kReconstructor, ParamGroup::kDiscriminator, ParamGroup::kPropensity};
std::string to_string(ParamGroup group);
ParamGroup parse_param_group(const std::string& name);

// Affine map (x - shift) / scale applied to x wherever it enters a
// subnetwork (and to the reconstruction target). Binary columns always keep
// shift 0 and scale 1.
struct InputScaler {
  RowVector shift;
  RowVector scale;

  static InputScaler identity(std::size_t dim);
  // Mean and population std of each continuous column; constant columns keep scale 1.
  static InputScaler fit(const Matrix& x, const std::vector<FeatureKind>& kinds);
  Matrix apply(const Matrix& x) const;
  bool operator==(const InputScaler&) const = default;
};

// Encoder f_E(x,t,y,eps_E) -> z_hat, inference f_I(x,t,eps_I) -> z,
// predictor f_P(z,x,t,eps_P) -> y_hat, reconstructor f_R(z_hat) -> (x,t,y),
// discriminator D(z,x,t,y) -> P(tuple came from the encoder), and the
// propensity classifier q(t=1|x).
//
// The encoder is a single Mlp: the reconstruction and the adversarial paths
// both read and update this one object.
struct CeganModel {
  DataSchema schema;
  ModelConfig config;
  Mlp encoder;
  Mlp inference;
  Mlp predictor;
  Mlp reconstructor;
  Mlp discriminator;
  Mlp propensity;
  InputScaler x_scaler;

  Mlp& group(ParamGroup g);
  const Mlp& group(ParamGroup g) const;
  // Checks every subnetwork's dimensions against schema and config.
  void validate() const;
};

CeganModel make_cegan_model(const DataSchema& schema, const ModelConfig& config, Rng& init_rng);

// x as the subnetworks see it.
Matrix scaled_x(const CeganModel& model, const Matrix& x);

// Inference-mode (dropout off) building blocks. Batches are row-major: one
// subject per row; t is a 0/1 vector; x is raw (the builders scale it).
Matrix encoder_input(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& y, const Matrix& eps);
Matrix inference_input(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& eps);
Matrix predictor_input(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, const Matrix& eps);
Matrix discriminator_input(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, const Matrix& y);
Reconstruction split_reconstruction(const CeganModel& model, const Matrix& output);

Matrix encode(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& y, Rng& rng);
Matrix infer_z(const CeganModel& model, const Matrix& x, const Vector& t, Rng& rng);
Matrix predict_y(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, Rng& rng);
Reconstruction reconstruct(const CeganModel& model, const Matrix& z_hat);
Vector discriminate(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, const Matrix& y);
Vector propensity(const CeganModel& model, const Matrix& x);

// Empirical value function per row: log D(z_hat,x,t,y) + log(1 - D(z,x,t,y_hat)).
Vector value_function(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& y,
                      const Matrix& z_hat, const Matrix& z, const Matrix& y_hat);

}  // namespace cegan
