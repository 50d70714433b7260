#include "cegan/model/checkpoint.hpp"

#include <fstream>

#include "cegan/numerics/errors.hpp"

namespace cegan {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "cegan-checkpoint";
constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ValidationError("checkpoint: tensor size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

json spec_to_json(const MlpSpec& s) {
  json acts = json::array();
  for (Activation a : s.output_column_activations) acts.push_back(to_string(a));
  return json{{"input_dim", s.input_dim},
              {"hidden_dims", s.hidden_dims},
              {"output_dim", s.output_dim},
              {"hidden_activation", to_string(s.hidden_activation)},
              {"output_activation", to_string(s.output_activation)},
              {"output_column_activations", acts},
              {"dropout_rate", s.dropout_rate}};
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec s;
  s.input_dim = j.at("input_dim").get<std::size_t>();
  s.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  s.output_dim = j.at("output_dim").get<std::size_t>();
  s.hidden_activation = parse_activation(j.at("hidden_activation").get<std::string>());
  s.output_activation = parse_activation(j.at("output_activation").get<std::string>());
  for (const auto& a : j.at("output_column_activations")) s.output_column_activations.push_back(parse_activation(a));
  s.dropout_rate = j.at("dropout_rate").get<double>();
  return s;
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.latent_dim = j.at("latent_dim").get<std::size_t>();
  c.encoder_noise_dim = j.at("encoder_noise_dim").get<std::size_t>();
  c.inference_noise_dim = j.at("inference_noise_dim").get<std::size_t>();
  c.predictor_noise_dim = j.at("predictor_noise_dim").get<std::size_t>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  c.propensity_hidden_dims = j.at("propensity_hidden_dims").get<std::vector<std::size_t>>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.input_corruption_std = j.at("input_corruption_std").get<double>();
  c.standardize_inputs = j.at("standardize_inputs").get<bool>();
  return c;
}

}  // namespace

json schema_to_json(const DataSchema& schema) {
  json x = json::array();
  json y = json::array();
  for (FeatureKind k : schema.x_kinds) x.push_back(to_string(k));
  for (FeatureKind k : schema.y_kinds) y.push_back(to_string(k));
  return json{{"x_kinds", x}, {"y_kinds", y}};
}

DataSchema schema_from_json(const json& j) {
  DataSchema s;
  for (const auto& k : j.at("x_kinds")) s.x_kinds.push_back(parse_feature_kind(k.get<std::string>()));
  for (const auto& k : j.at("y_kinds")) s.y_kinds.push_back(parse_feature_kind(k.get<std::string>()));
  s.validate();
  return s;
}

json model_config_to_json(const ModelConfig& c) {
  return json{{"latent_dim", c.latent_dim},
              {"encoder_noise_dim", c.encoder_noise_dim},
              {"inference_noise_dim", c.inference_noise_dim},
              {"predictor_noise_dim", c.predictor_noise_dim},
              {"hidden_dims", c.hidden_dims},
              {"propensity_hidden_dims", c.propensity_hidden_dims},
              {"dropout_rate", c.dropout_rate},
              {"input_corruption_std", c.input_corruption_std},
              {"standardize_inputs", c.standardize_inputs}};
}

void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  const CeganModel& m = checkpoint.model;
  json nets = json::object();
  for (ParamGroup g : kAllParamGroups) {
    const Mlp& net = m.group(g);
    json layers = json::array();
    for (const auto& l : net.params.layers) {
      layers.push_back(json{{"weight", matrix_to_json(l.weight)}, {"bias", matrix_to_json(l.bias)}});
    }
    nets[to_string(g)] = json{{"spec", spec_to_json(net.spec)}, {"layers", layers}};
  }
  const json doc{{"format", kFormat},
                 {"format_version", kFormatVersion},
                 {"schema", schema_to_json(m.schema)},
                 {"model_config", model_config_to_json(m.config)},
                 {"train_config_fingerprint", checkpoint.train_config_fingerprint},
                 {"x_scaler", json{{"shift", matrix_to_json(m.x_scaler.shift)}, {"scale", matrix_to_json(m.x_scaler.scale)}}},
                 {"networks", nets}};
  out << doc.dump(1) << '\n';
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  save_checkpoint(out, checkpoint);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(std::istream& in, const std::optional<DataSchema>& expected_schema) {
  try {
    const json doc = json::parse(in);
    if (doc.at("format").get<std::string>() != kFormat) throw ValidationError("checkpoint: unrecognised format tag");
    if (doc.at("format_version").get<int>() != kFormatVersion) throw ValidationError("checkpoint: unsupported version");
    Checkpoint cp{CeganModel{schema_from_json(doc.at("schema")), model_config_from_json(doc.at("model_config")),
                             {}, {}, {}, {}, {}, {}, {}},
                  doc.at("train_config_fingerprint").get<std::string>()};
    if (expected_schema && !(*expected_schema == cp.model.schema)) {
      throw ValidationError("checkpoint schema " + cp.model.schema.describe() + " does not match dataset schema " +
                            expected_schema->describe());
    }
    const json& scaler = doc.at("x_scaler");
    const Matrix shift = matrix_from_json(scaler.at("shift"));
    const Matrix scale = matrix_from_json(scaler.at("scale"));
    if (shift.rows() != 1 || scale.rows() != 1) throw ValidationError("checkpoint: x_scaler must hold row vectors");
    cp.model.x_scaler = InputScaler{shift.row(0), scale.row(0)};
    const json& nets = doc.at("networks");
    for (ParamGroup g : kAllParamGroups) {
      const json& jn = nets.at(to_string(g));
      Mlp& net = cp.model.group(g);
      net.spec = spec_from_json(jn.at("spec"));
      for (const auto& jl : jn.at("layers")) {
        const Matrix w = matrix_from_json(jl.at("weight"));
        const Matrix b = matrix_from_json(jl.at("bias"));
        if (b.rows() != 1) throw ValidationError("checkpoint: bias must be a row vector");
        net.params.layers.push_back({w, b.row(0)});
        net.params.adam_m.push_back({Matrix::Zero(w.rows(), w.cols()), RowVector::Zero(b.cols())});
        net.params.adam_v.push_back({Matrix::Zero(w.rows(), w.cols()), RowVector::Zero(b.cols())});
      }
    }
    cp.model.validate();
    return cp;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("checkpoint: malformed document: ") + e.what());
  } catch (const ShapeError& e) {
    throw ValidationError(std::string("checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<DataSchema>& expected_schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  return load_checkpoint(in, expected_schema);
}

}  // namespace cegan
