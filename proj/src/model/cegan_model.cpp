#include "cegan/model/cegan_model.hpp"

#include <cmath>
#include <string>

#include "cegan/numerics/errors.hpp"

namespace cegan {

ModelConfig& ModelConfig::set_latent_dim(std::size_t d) {
  latent_dim = d;
  encoder_noise_dim = inference_noise_dim = predictor_noise_dim = d;
  return *this;
}

void ModelConfig::validate() const {
  if (latent_dim == 0) throw ValidationError("model: latent_dim must be >= 1");
  if (hidden_dims.empty() || propensity_hidden_dims.empty()) {
    throw ValidationError("model: hidden_dims must be non-empty");
  }
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw ValidationError("model: hidden widths must be >= 1");
  }
  for (std::size_t h : propensity_hidden_dims) {
    if (h == 0) throw ValidationError("model: propensity hidden widths must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ValidationError("model: dropout must lie in [0, 1)");
  if (!(input_corruption_std >= 0.0)) throw ValidationError("model: input_corruption_std must be >= 0");
}

std::string to_string(ParamGroup group) {
  switch (group) {
    case ParamGroup::kEncoder: return "encoder";
    case ParamGroup::kInference: return "inference";
    case ParamGroup::kPredictor: return "predictor";
    case ParamGroup::kReconstructor: return "reconstructor";
    case ParamGroup::kDiscriminator: return "discriminator";
    case ParamGroup::kPropensity: return "propensity";
  }
  return "unknown";
}

ParamGroup parse_param_group(const std::string& name) {
  for (ParamGroup g : kAllParamGroups) {
    if (to_string(g) == name) return g;
  }
  throw ValidationError("unknown parameter group '" + name + "'");
}

Mlp& CeganModel::group(ParamGroup g) {
  return const_cast<Mlp&>(static_cast<const CeganModel&>(*this).group(g));
}

const Mlp& CeganModel::group(ParamGroup g) const {
  switch (g) {
    case ParamGroup::kEncoder: return encoder;
    case ParamGroup::kInference: return inference;
    case ParamGroup::kPredictor: return predictor;
    case ParamGroup::kReconstructor: return reconstructor;
    case ParamGroup::kDiscriminator: return discriminator;
    case ParamGroup::kPropensity: return propensity;
  }
  return encoder;
}

namespace {

struct Dims {
  std::size_t x, y, z;
};

MlpSpec make_spec(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, Activation out_act,
                  double dropout) {
  MlpSpec s;
  s.input_dim = in;
  s.hidden_dims = hidden;
  s.output_dim = out;
  s.output_activation = out_act;
  s.dropout_rate = dropout;
  return s;
}

std::vector<Activation> activations_for(const std::vector<FeatureKind>& kinds) {
  std::vector<Activation> out;
  for (FeatureKind k : kinds) out.push_back(k == FeatureKind::kBinary ? Activation::kSigmoid : Activation::kIdentity);
  return out;
}

std::vector<MlpSpec> build_specs(const DataSchema& schema, const ModelConfig& c) {
  const Dims d{schema.x_dim(), schema.y_dim(), c.latent_dim};
  const double p = c.dropout_rate;
  std::vector<MlpSpec> specs;
  specs.push_back(make_spec(d.x + 1 + d.y + c.encoder_noise_dim, c.hidden_dims, d.z, Activation::kIdentity, p));
  specs.push_back(make_spec(d.x + 1 + c.inference_noise_dim, c.hidden_dims, d.z, Activation::kIdentity, p));

  MlpSpec pred = make_spec(d.z + d.x + 1 + c.predictor_noise_dim, c.hidden_dims, d.y, Activation::kIdentity, p);
  pred.output_column_activations = activations_for(schema.y_kinds);
  specs.push_back(pred);

  // Three heads laid out as column blocks: x_bar | t_bar | y_bar.
  MlpSpec recon = make_spec(d.z, c.hidden_dims, d.x + 1 + d.y, Activation::kIdentity, p);
  recon.output_column_activations = activations_for(schema.x_kinds);
  recon.output_column_activations.push_back(Activation::kSigmoid);
  for (Activation a : activations_for(schema.y_kinds)) recon.output_column_activations.push_back(a);
  specs.push_back(recon);

  specs.push_back(make_spec(d.z + d.x + 1 + d.y, c.hidden_dims, 1, Activation::kSigmoid, p));
  specs.push_back(make_spec(d.x, c.propensity_hidden_dims, 1, Activation::kSigmoid, p));
  return specs;
}

void require_rows(const Matrix& m, Eigen::Index rows, const char* what) {
  if (m.rows() != rows) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + " rows, got " +
                     std::to_string(m.rows()));
  }
}

}  // namespace

InputScaler InputScaler::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return InputScaler{RowVector::Zero(d), RowVector::Ones(d)};
}

InputScaler InputScaler::fit(const Matrix& x, const std::vector<FeatureKind>& kinds) {
  require_shape(x, x.rows(), kinds.size(), "scaler x");
  InputScaler s = identity(kinds.size());
  if (x.rows() == 0) return s;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (kinds[j] != FeatureKind::kContinuous) continue;
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
    s.shift(j) = mean;
    if (sd > 1e-12) s.scale(j) = sd;
  }
  return s;
}

Matrix InputScaler::apply(const Matrix& x) const {
  require_shape(x, x.rows(), shift.size(), "scaler input");
  return ((x.rowwise() - shift).array().rowwise() / scale.array()).matrix();
}

Matrix scaled_x(const CeganModel& model, const Matrix& x) { return model.x_scaler.apply(x); }

CeganModel make_cegan_model(const DataSchema& schema, const ModelConfig& config, Rng& init_rng) {
  schema.validate();
  config.validate();
  const std::vector<MlpSpec> specs = build_specs(schema, config);
  CeganModel m{schema, config, {}, {}, {}, {}, {}, {}, InputScaler::identity(schema.x_dim())};
  for (std::size_t i = 0; i < kNumParamGroups; ++i) {
    Mlp& net = m.group(kAllParamGroups[i]);
    net.spec = specs[i];
    Rng stream = init_rng.child(i);
    net.params = xavier_init(net.spec, stream);
  }
  return m;
}

void CeganModel::validate() const {
  schema.validate();
  config.validate();
  const std::vector<MlpSpec> expected = build_specs(schema, config);
  for (std::size_t i = 0; i < kNumParamGroups; ++i) {
    const Mlp& net = group(kAllParamGroups[i]);
    const std::string name = to_string(kAllParamGroups[i]);
    if (!(net.spec == expected[i])) throw ShapeError("model: " + name + " spec disagrees with schema/config");
    if (net.params.layers.size() != net.spec.num_layers()) throw ShapeError("model: " + name + " layer count");
    std::size_t fan_in = net.spec.input_dim;
    for (std::size_t l = 0; l < net.spec.num_layers(); ++l) {
      const std::size_t fan_out = l < net.spec.hidden_dims.size() ? net.spec.hidden_dims[l] : net.spec.output_dim;
      require_shape(net.params.layers[l].weight, fan_in, fan_out, name + " weight");
      require_shape(net.params.layers[l].bias, 1, fan_out, name + " bias");
      fan_in = fan_out;
    }
  }
  require_shape(x_scaler.shift, 1, schema.x_dim(), "x scaler shift");
  require_shape(x_scaler.scale, 1, schema.x_dim(), "x scaler scale");
  if (!all_finite(x_scaler.shift) || !all_finite(x_scaler.scale) || (x_scaler.scale.array() <= 0.0).any()) {
    throw ValidationError("model: x scaler must be finite with positive scales");
  }
}

Matrix encoder_input(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& y, const Matrix& eps) {
  require_shape(x, x.rows(), model.schema.x_dim(), "encoder x");
  require_shape(y, x.rows(), model.schema.y_dim(), "encoder y");
  require_shape(eps, x.rows(), model.config.encoder_noise_dim, "encoder noise");
  const Matrix tc = as_column(t);
  require_rows(tc, x.rows(), "encoder t");
  const Matrix xs = scaled_x(model, x);
  return hconcat({&xs, &tc, &y, &eps});
}

Matrix inference_input(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& eps) {
  require_shape(x, x.rows(), model.schema.x_dim(), "inference x");
  require_shape(eps, x.rows(), model.config.inference_noise_dim, "inference noise");
  const Matrix tc = as_column(t);
  require_rows(tc, x.rows(), "inference t");
  const Matrix xs = scaled_x(model, x);
  return hconcat({&xs, &tc, &eps});
}

Matrix predictor_input(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, const Matrix& eps) {
  require_shape(z, x.rows(), model.config.latent_dim, "predictor z");
  require_shape(x, x.rows(), model.schema.x_dim(), "predictor x");
  require_shape(eps, x.rows(), model.config.predictor_noise_dim, "predictor noise");
  const Matrix tc = as_column(t);
  require_rows(tc, x.rows(), "predictor t");
  const Matrix xs = scaled_x(model, x);
  return hconcat({&z, &xs, &tc, &eps});
}

Matrix discriminator_input(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t,
                           const Matrix& y) {
  require_shape(z, x.rows(), model.config.latent_dim, "discriminator z");
  require_shape(x, x.rows(), model.schema.x_dim(), "discriminator x");
  require_shape(y, x.rows(), model.schema.y_dim(), "discriminator y");
  const Matrix tc = as_column(t);
  require_rows(tc, x.rows(), "discriminator t");
  const Matrix xs = scaled_x(model, x);
  return hconcat({&z, &xs, &tc, &y});
}

Reconstruction split_reconstruction(const CeganModel& model, const Matrix& output) {
  const Eigen::Index dx = static_cast<Eigen::Index>(model.schema.x_dim());
  const Eigen::Index dy = static_cast<Eigen::Index>(model.schema.y_dim());
  require_shape(output, output.rows(), dx + 1 + dy, "reconstruction output");
  return Reconstruction{output.leftCols(dx), output.col(dx), output.rightCols(dy)};
}

Matrix encode(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& y, Rng& rng) {
  const Matrix eps = rng.normal_matrix(x.rows(), model.config.encoder_noise_dim);
  return predict(model.encoder, encoder_input(model, x, t, y, eps));
}

Matrix infer_z(const CeganModel& model, const Matrix& x, const Vector& t, Rng& rng) {
  const Matrix eps = rng.normal_matrix(x.rows(), model.config.inference_noise_dim);
  return predict(model.inference, inference_input(model, x, t, eps));
}

Matrix predict_y(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, Rng& rng) {
  const Matrix eps = rng.normal_matrix(x.rows(), model.config.predictor_noise_dim);
  return predict(model.predictor, predictor_input(model, z, x, t, eps));
}

Reconstruction reconstruct(const CeganModel& model, const Matrix& z_hat) {
  require_shape(z_hat, z_hat.rows(), model.config.latent_dim, "reconstruct z_hat");
  return split_reconstruction(model, predict(model.reconstructor, z_hat));
}

Vector discriminate(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, const Matrix& y) {
  return predict(model.discriminator, discriminator_input(model, z, x, t, y)).col(0);
}

Vector propensity(const CeganModel& model, const Matrix& x) {
  require_shape(x, x.rows(), model.schema.x_dim(), "propensity x");
  return predict(model.propensity, scaled_x(model, x)).col(0);
}

Vector value_function(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& y,
                      const Matrix& z_hat, const Matrix& z, const Matrix& y_hat) {
  return value_from_probabilities(discriminate(model, z_hat, x, t, y), discriminate(model, z, x, t, y_hat));
}

}  // namespace cegan
