#include "cegan/numerics/mlp.hpp"

#include <cmath>
#include <string>

namespace cegan {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
  }
  return "identity";
}

Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  throw ValidationError("unknown activation '" + name + "'");
}

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw ShapeError("MlpSpec: zero input or output dim");
  if (hidden_dims.empty()) throw ShapeError("MlpSpec: hidden_dims must be non-empty");
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw ShapeError("MlpSpec: zero-width hidden layer");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ValidationError("MlpSpec: dropout_rate must lie in [0, 1)");
  }
  if (!output_column_activations.empty() && output_column_activations.size() != output_dim) {
    throw ShapeError("MlpSpec: output_column_activations length != output_dim");
  }
}

Activation MlpSpec::activation_for_column(std::size_t col) const {
  return output_column_activations.empty() ? output_activation : output_column_activations[col];
}

std::size_t NetworkParams::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

NetworkGradients NetworkGradients::zeros_like(const NetworkParams& params) {
  NetworkGradients g;
  for (const auto& l : params.layers) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()),
                        RowVector::Zero(l.bias.size())});
  }
  return g;
}

NetworkGradients& NetworkGradients::operator+=(const NetworkGradients& other) {
  if (other.layers.size() != layers.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

bool NetworkGradients::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

double NetworkGradients::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

NetworkParams xavier_init(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  NetworkParams p;
  std::size_t fan_in = spec.input_dim;
  for (std::size_t layer = 0; layer < spec.num_layers(); ++layer) {
    const std::size_t fan_out =
        layer < spec.hidden_dims.size() ? spec.hidden_dims[layer] : spec.output_dim;
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    LayerParams l{Matrix(fan_in, fan_out), RowVector::Zero(fan_out)};
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = rng.uniform(-bound, bound);
    p.adam_m.push_back({Matrix::Zero(fan_in, fan_out), RowVector::Zero(fan_out)});
    p.adam_v.push_back({Matrix::Zero(fan_in, fan_out), RowVector::Zero(fan_out)});
    p.layers.push_back(std::move(l));
    fan_in = fan_out;
  }
  return p;
}

DropoutMasks draw_dropout_masks(const MlpSpec& spec, std::size_t rows, Rng& rng) {
  DropoutMasks masks;
  if (spec.dropout_rate <= 0.0) return masks;
  const double keep = 1.0 - spec.dropout_rate;
  const double scale = 1.0 / keep;
  for (std::size_t width : spec.hidden_dims) {
    Matrix m(rows, width);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < keep ? scale : 0.0;
    masks.push_back(std::move(m));
  }
  return masks;
}

namespace {

void apply_output_activation(const MlpSpec& spec, Matrix& values) {
  for (std::size_t c = 0; c < spec.output_dim; ++c) {
    if (spec.activation_for_column(c) != Activation::kSigmoid) continue;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      values(r, c) = clamp_probability(sigmoid(values(r, c)));
    }
  }
}

}  // namespace

Tape forward(const NetworkParams& params, const MlpSpec& spec, const Matrix& input,
             const DropoutMasks& masks) {
  if (static_cast<std::size_t>(input.cols()) != spec.input_dim) {
    throw ShapeError("forward: input has " + std::to_string(input.cols()) +
                     " columns, network expects " + std::to_string(spec.input_dim));
  }
  if (params.layers.size() != spec.num_layers()) throw ShapeError("forward: params/spec layer mismatch");
  if (!masks.empty() && masks.size() != spec.hidden_dims.size()) {
    throw ShapeError("forward: wrong number of dropout masks");
  }

  Tape tape;
  tape.params = &params;
  tape.spec = &spec;
  tape.version = params.version;
  tape.masks = masks;
  tape.layer_inputs.reserve(spec.num_layers());
  tape.pre_activations.reserve(spec.num_layers());

  Matrix current = input;
  for (std::size_t layer = 0; layer < spec.num_layers(); ++layer) {
    const LayerParams& l = params.layers[layer];
    Matrix pre = current * l.weight;
    pre.rowwise() += l.bias;
    tape.layer_inputs.push_back(std::move(current));
    if (layer + 1 < spec.num_layers()) {
      current = pre.cwiseMax(0.0);
      if (!masks.empty()) {
        require_shape(masks[layer], pre.rows(), pre.cols(), "dropout mask");
        current = current.cwiseProduct(masks[layer]);
      }
    } else {
      current = pre;
      apply_output_activation(spec, current);
    }
    tape.pre_activations.push_back(std::move(pre));
  }
  tape.output = std::move(current);
  return tape;
}

Tape forward(const NetworkParams& params, const MlpSpec& spec, const Matrix& input,
             bool training, Rng& rng) {
  if (training && spec.dropout_rate > 0.0) {
    return forward(params, spec, input, draw_dropout_masks(spec, input.rows(), rng));
  }
  return forward(params, spec, input, DropoutMasks{});
}

Matrix predict(const Mlp& net, const Matrix& input) {
  return forward(net.params, net.spec, input, DropoutMasks{}).output;
}

BackwardResult backward(const Tape& tape, const Matrix& upstream) {
  if (tape.params == nullptr || tape.spec == nullptr) throw ShapeError("backward: empty tape");
  if (tape.params->version != tape.version) {
    throw ShapeError("backward: stale tape (parameters updated since forward)");
  }
  const MlpSpec& spec = *tape.spec;
  require_shape(upstream, tape.output.rows(), spec.output_dim, "backward upstream gradient");

  // Gradient w.r.t. the output layer's pre-activation.
  Matrix delta = upstream;
  for (std::size_t c = 0; c < spec.output_dim; ++c) {
    if (spec.activation_for_column(c) != Activation::kSigmoid) continue;
    for (Eigen::Index r = 0; r < delta.rows(); ++r) {
      const double p = tape.output(r, c);
      // Outputs pinned at the clamp have zero derivative.
      const double raw = sigmoid(tape.pre_activations.back()(r, c));
      const bool clamped = raw < kProbabilityFloor || raw > 1.0 - kProbabilityFloor;
      delta(r, c) *= clamped ? 0.0 : p * (1.0 - p);
    }
  }

  BackwardResult result;
  result.params.layers.resize(spec.num_layers());
  for (std::size_t layer = spec.num_layers(); layer-- > 0;) {
    const LayerParams& l = tape.params->layers[layer];
    result.params.layers[layer].weight = tape.layer_inputs[layer].transpose() * delta;
    result.params.layers[layer].bias = delta.colwise().sum();
    Matrix grad_input = delta * l.weight.transpose();
    if (layer == 0) {
      result.input = std::move(grad_input);
      break;
    }
    // Back through dropout and the ReLU of the previous hidden layer.
    const std::size_t prev = layer - 1;
    if (!tape.masks.empty()) grad_input = grad_input.cwiseProduct(tape.masks[prev]);
    const Matrix& pre = tape.pre_activations[prev];
    delta = grad_input.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  }
  return result;
}

}  // namespace cegan
