#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cegan/numerics/matrix.hpp"
#include "cegan/numerics/rng.hpp"

namespace cegan {

enum class Activation { kIdentity, kSigmoid, kRelu };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

// Topology of a fully connected network. Hidden layers use
// `hidden_activation`; the output layer uses `output_activation`, or a
// per-column activation when `output_column_activations` is non-empty (this
// is how a multi-head network with mixed binary/continuous heads is
// expressed: each head is a block of output columns).
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims{200, 200, 200};
  std::size_t output_dim = 0;
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kIdentity;
  std::vector<Activation> output_column_activations;
  double dropout_rate = 0.0;

  void validate() const;
  std::size_t num_layers() const { return hidden_dims.size() + 1; }
  Activation activation_for_column(std::size_t col) const;
  bool operator==(const MlpSpec&) const = default;
};

struct LayerParams {
  Matrix weight;  // fan_in x fan_out
  RowVector bias;
};

struct NetworkParams {
  std::vector<LayerParams> layers;
  std::vector<LayerParams> adam_m;
  std::vector<LayerParams> adam_v;
  std::int64_t adam_t = 0;
  // Bumped on every update; tapes recorded against an older version are stale.
  std::uint64_t version = 0;

  std::size_t num_parameters() const;
};

struct NetworkGradients {
  std::vector<LayerParams> layers;

  static NetworkGradients zeros_like(const NetworkParams& params);
  NetworkGradients& operator+=(const NetworkGradients& other);
  bool all_finite() const;
  double squared_norm() const;
};

// Scaled keep-masks (0 or 1/(1-d)) for each hidden layer. Empty means the
// network runs in inference mode.
using DropoutMasks = std::vector<Matrix>;

// Activations cached by forward() for the reverse pass.
struct Tape {
  const NetworkParams* params = nullptr;
  const MlpSpec* spec = nullptr;
  std::uint64_t version = 0;
  std::vector<Matrix> layer_inputs;  // input fed to each layer
  std::vector<Matrix> pre_activations;
  DropoutMasks masks;
  Matrix output;
};

struct BackwardResult {
  NetworkGradients params;
  Matrix input;
};

// A spec with its parameters; the unit every subnetwork is built from.
struct Mlp {
  MlpSpec spec;
  NetworkParams params;
};

// Uniform Xavier weights on +-sqrt(6 / (fan_in + fan_out)); zero biases.
NetworkParams xavier_init(const MlpSpec& spec, Rng& rng);

DropoutMasks draw_dropout_masks(const MlpSpec& spec, std::size_t rows, Rng& rng);

Tape forward(const NetworkParams& params, const MlpSpec& spec, const Matrix& input,
             const DropoutMasks& masks);
// Draws fresh masks from rng when training and spec.dropout_rate > 0.
Tape forward(const NetworkParams& params, const MlpSpec& spec, const Matrix& input,
             bool training, Rng& rng);
// Inference-mode output only.
Matrix predict(const Mlp& net, const Matrix& input);

BackwardResult backward(const Tape& tape, const Matrix& upstream);

}  // namespace cegan
