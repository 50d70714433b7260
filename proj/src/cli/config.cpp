#include "cegan/cli/config.hpp"

#include <fstream>
#include <initializer_list>

namespace cegan {
namespace {

using nlohmann::json;

// Typed, path-aware access to one object of the config document.
class Section {
 public:
  Section(const json& obj, std::string path, std::initializer_list<const char*> allowed) : obj_(obj), path_(path) {
    if (!obj.is_object()) throw ValidationError(label() + ": expected an object");
    for (const auto& item : obj.items()) {
      bool known = false;
      for (const char* key : allowed) known = known || item.key() == key;
      if (!known) throw ValidationError("unknown config key '" + child_path(item.key()) + "'");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& raw(const char* key) const { return obj_.at(key); }
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void read(const char* key, T* out) const {
    if (!obj_.contains(key)) return;
    try {
      *out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(child_path(key) + ": wrong type");
    }
  }

  // Non-negative integer field.
  void read_count(const char* key, std::size_t* out) const {
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(child_path(key) + ": expected a non-negative integer");
    }
    *out = v.get<std::size_t>();
  }

  template <typename E, typename Parse>
  void read_enum(const char* key, E* out, Parse parse) const {
    std::string name;
    read(key, &name);
    if (name.empty() && !obj_.contains(key)) return;
    try {
      *out = parse(name);
    } catch (const ValidationError& e) {
      throw ValidationError(child_path(key) + ": " + e.what());
    }
  }

  template <typename E, typename Parse>
  void read_enum_list(const char* key, std::vector<E>* out, Parse parse) const {
    std::vector<std::string> names;
    if (!obj_.contains(key)) return;
    read(key, &names);
    out->clear();
    for (const std::string& n : names) {
      try {
        out->push_back(parse(n));
      } catch (const ValidationError& e) {
        throw ValidationError(child_path(key) + ": " + e.what());
      }
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }
  const json& obj_;
  std::string path_;
};

// Re-throws validation failures prefixed by the section path.
template <typename Fn>
void validate_section(const std::string& path, Fn fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void parse_generator(const json& j, const std::filesystem::path& base, GeneratorSpec* g) {
  Section s(j, "generator", {"toy", "twins_like", "csv"});
  if (j.size() != 1) throw ValidationError("generator: exactly one of toy, twins_like, csv is required");
  if (s.has("toy")) {
    g->kind = GeneratorSpec::Kind::kToy;
    Section t(s.raw("toy"), "generator.toy", {"n", "dim", "zeta"});
    t.read_count("n", &g->toy.n);
    t.read_count("dim", &g->toy.dim);
    t.read("zeta", &g->toy.zeta);
    if (!(g->toy.zeta >= 0.0)) throw ValidationError("generator.toy.zeta: must be >= 0");
    validate_section("generator.toy", [&] { g->toy.validate(); });
  } else if (s.has("twins_like")) {
    g->kind = GeneratorSpec::Kind::kTwinsLike;
    TwinsLikeConfig& c = g->twins;
    Section t(s.raw("twins_like"), "generator.twins_like",
              {"n", "base_features", "scheme", "w_mean", "w_std", "flip_probability", "replicas", "w_o_variance",
               "w_h_mean", "w_h_variance", "latent_confounding", "outcome_slope", "outcome_bias0", "outcome_bias1",
               "gestation_beta_a", "gestation_beta_b"});
    t.read_count("n", &c.n);
    t.read_count("base_features", &c.base_features);
    t.read_enum("scheme", &c.scheme, parse_proxy_scheme);
    t.read("w_mean", &c.w_mean);
    t.read("w_std", &c.w_std);
    t.read("flip_probability", &c.flip_probability);
    t.read_count("replicas", &c.replicas);
    t.read("w_o_variance", &c.w_o_variance);
    t.read("w_h_mean", &c.w_h_mean);
    t.read("w_h_variance", &c.w_h_variance);
    t.read("latent_confounding", &c.latent_confounding);
    t.read("outcome_slope", &c.outcome_slope);
    t.read("outcome_bias0", &c.outcome_bias0);
    t.read("outcome_bias1", &c.outcome_bias1);
    t.read("gestation_beta_a", &c.gestation_beta_a);
    t.read("gestation_beta_b", &c.gestation_beta_b);
    validate_section("generator.twins_like", [&] { c.validate(); });
  } else {
    g->kind = GeneratorSpec::Kind::kCsv;
    Section t(s.raw("csv"), "generator.csv", {"path", "schema"});
    std::string path;
    std::string schema;
    t.read("path", &path);
    t.read("schema", &schema);
    if (path.empty()) throw ValidationError("generator.csv.path: required");
    g->csv_path = resolve(base, path).string();
    g->schema_path = schema.empty() ? g->csv_path + ".schema.json" : resolve(base, schema).string();
    if (!std::filesystem::exists(g->csv_path)) {
      throw ValidationError("generator.csv.path: no such file '" + g->csv_path + "'");
    }
    if (!std::filesystem::exists(g->schema_path)) {
      throw ValidationError("generator.csv.schema: no such file '" + g->schema_path + "'");
    }
  }
}

void parse_train(const json& j, TrainConfig* c) {
  Section s(j, "train",
            {"batch_reconstruction", "batch_discriminator", "batch_generator", "batch_propensity", "learning_rate",
             "beta1", "beta2", "epsilon", "alpha", "max_iterations", "eval_every", "patience", "disc_steps_per_iter",
             "gen_steps_per_iter", "generator_loss"});
  s.read_count("batch_reconstruction", &c->batch_reconstruction);
  s.read_count("batch_discriminator", &c->batch_discriminator);
  s.read_count("batch_generator", &c->batch_generator);
  s.read_count("batch_propensity", &c->batch_propensity);
  s.read("learning_rate", &c->adam.learning_rate);
  s.read("beta1", &c->adam.beta1);
  s.read("beta2", &c->adam.beta2);
  s.read("epsilon", &c->adam.epsilon);
  s.read("alpha", &c->alpha);
  s.read_count("max_iterations", &c->max_iterations);
  s.read_count("eval_every", &c->eval_every);
  s.read_count("patience", &c->patience);
  s.read_count("disc_steps_per_iter", &c->disc_steps_per_iter);
  s.read_count("gen_steps_per_iter", &c->gen_steps_per_iter);
  s.read_enum("generator_loss", &c->generator_loss, parse_generator_loss);
  validate_section("train", [&] { c->validate(); });
}

void parse_model(const json& j, ModelConfig* c) {
  Section s(j, "model",
            {"latent_dim", "encoder_noise_dim", "inference_noise_dim", "predictor_noise_dim", "hidden_dims",
             "propensity_hidden_dims", "dropout_rate", "input_corruption_std", "standardize_inputs"});
  // latent_dim also sets the noise widths unless they are given explicitly.
  if (s.has("latent_dim")) {
    std::size_t d = 0;
    s.read_count("latent_dim", &d);
    c->set_latent_dim(d);
  }
  s.read_count("encoder_noise_dim", &c->encoder_noise_dim);
  s.read_count("inference_noise_dim", &c->inference_noise_dim);
  s.read_count("predictor_noise_dim", &c->predictor_noise_dim);
  s.read("hidden_dims", &c->hidden_dims);
  s.read("propensity_hidden_dims", &c->propensity_hidden_dims);
  s.read("dropout_rate", &c->dropout_rate);
  s.read("input_corruption_std", &c->input_corruption_std);
  s.read("standardize_inputs", &c->standardize_inputs);
  validate_section("model", [&] { c->validate(); });
}

void parse_inference(const json& j, IteConfig* c) {
  Section s(j, "inference", {"mc_samples", "z_mode", "paired"});
  s.read_count("mc_samples", &c->mc_samples);
  s.read_enum("z_mode", &c->z_mode, parse_z_mode);
  s.read("paired", &c->paired);
  validate_section("inference", [&] { c->validate(); });
}

void parse_eval(const json& j, ExperimentSpec* spec) {
  Section s(j, "eval", {"methods", "realizations", "metrics", "splits", "split_fractions", "knn_k"});
  s.read_enum_list("methods", &spec->methods, parse_method_id);
  s.read_count("realizations", &spec->realizations);
  s.read_enum_list("metrics", &spec->metrics, parse_metric);
  s.read_enum_list("splits", &spec->splits, parse_split);
  s.read("split_fractions", &spec->split_fractions);
  s.read_count("knn_k", &spec->knn_k);
  double total = 0.0;
  for (double f : spec->split_fractions) {
    if (!(f >= 0.0)) throw ValidationError("eval.split_fractions: must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("eval.split_fractions: must sum to 1");
}

SweepSpec parse_sweep(const json& j) {
  Section s(j, "sweep", {"parameter", "values"});
  SweepSpec out;
  if (!s.has("parameter") || !s.has("values")) throw ValidationError("sweep: parameter and values are required");
  s.read_enum("parameter", &out.parameter, parse_sweep_parameter);
  s.read("values", &out.values);
  if (out.values.empty()) throw ValidationError("sweep.values: at least one value required");
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  Section root(doc, "", {"seed", "output_dir", "generator", "train", "model", "inference", "eval", "sweep"});
  ExperimentConfig cfg;
  if (!root.has("generator")) throw ValidationError("generator: required");
  root.read("seed", &cfg.spec.seed);
  root.read("output_dir", &cfg.output_dir);
  if (!cfg.output_dir.empty()) cfg.output_dir = resolve(base_dir, cfg.output_dir).string();
  parse_generator(root.raw("generator"), base_dir, &cfg.spec.generator);
  if (root.has("train")) parse_train(root.raw("train"), &cfg.spec.train);
  if (root.has("model")) parse_model(root.raw("model"), &cfg.spec.model);
  if (root.has("inference")) parse_inference(root.raw("inference"), &cfg.spec.ite);
  if (root.has("eval")) parse_eval(root.raw("eval"), &cfg.spec);
  if (root.has("sweep")) {
    cfg.sweep = parse_sweep(root.raw("sweep"));
    for (double v : cfg.sweep->values) {
      validate_section("sweep", [&] { with_parameter(cfg.spec, cfg.sweep->parameter, v).generator.validate(); });
    }
  }
  cfg.spec.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

}  // namespace cegan
