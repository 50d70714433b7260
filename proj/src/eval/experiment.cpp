#include "cegan/eval/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "cegan/datagen/csv_io.hpp"
#include "cegan/eval/metrics.hpp"
#include "cegan/model/checkpoint.hpp"
#include "cegan/numerics/hash.hpp"

namespace cegan {
namespace {

using nlohmann::json;

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kMethodStreamBase = 2;
constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kInferenceStream = 1;
constexpr std::uint64_t kDiagnosticsStream = 2;

struct RealizationOutput {
  std::vector<RealizationRecord> records;
  std::vector<MethodFailure> failures;
};

Dataset generate(const ExperimentSpec& spec, const Dataset* fixed, std::uint64_t data_seed) {
  switch (spec.generator.kind) {
    case GeneratorSpec::Kind::kToy: {
      ToyGenConfig c = spec.generator.toy;
      c.seed = data_seed;
      return generate_toy(c);
    }
    case GeneratorSpec::Kind::kTwinsLike: {
      TwinsLikeConfig c = spec.generator.twins;
      c.seed = data_seed;
      return generate_twins_like(c);
    }
    case GeneratorSpec::Kind::kCsv:
      return *fixed;
  }
  return *fixed;
}

std::unique_ptr<IteEstimator> fit_method(const ExperimentSpec& spec, MethodId method, const RealizationData& data,
                                         std::uint64_t method_seed) {
  const TrainConfig train = method_train_config(spec.train, method_seed);
  const IteConfig ite = method_ite_config(spec.ite, method_seed);
  switch (method) {
    case MethodId::kCegan: return fit_cegan(data.train, data.valid, train, spec.model, ite);
    case MethodId::kCeganLp: return fit_cegan_lp(data.train, data.valid, train, spec.model, ite);
    case MethodId::kLr1: return fit_lr1(data.train);
    case MethodId::kLr2: return fit_lr2(data.train);
    case MethodId::kKnn: return fit_knn(data.train, spec.knn_k);
  }
  throw ValidationError("unknown method");
}

std::vector<MetricValue> evaluate(const ExperimentSpec& spec, MethodId method, const IteEstimator& estimator,
                                  const RealizationData& data, std::uint64_t method_seed) {
  const auto* cegan = dynamic_cast<const CeganEstimator*>(&estimator);
  const std::uint64_t diag_seed = Rng(method_seed).child(kDiagnosticsStream).key();
  std::vector<MetricValue> out;
  for (Split split : spec.splits) {
    const Dataset& d = data.get(split);
    std::optional<ItEstimate> est;
    std::optional<IntermediateDiagnostics> diag;
    std::optional<DiscriminatorBalance> balance;
    for (Metric metric : spec.metrics) {
      if (!metric_applies(metric, method)) continue;
      double value = 0.0;
      switch (metric) {
        case Metric::kSqrtPehe:
        case Metric::kAteError:
          if (!est) est = estimator.estimate(d.x);
          value = metric == Metric::kSqrtPehe ? std::sqrt(pehe(*d.y1, *d.y0, est->y1_hat, est->y0_hat))
                                              : ate_error(*d.y1, *d.y0, est->y1_hat, est->y0_hat);
          break;
        case Metric::kTreatmentXent:
        case Metric::kOutcomeGap:
          if (!diag) {
            IteConfig c = cegan->ite_config();
            c.seed = diag_seed;
            diag = intermediate_diagnostics(cegan->model(), d.x, d.t, c);
          }
          value = metric == Metric::kTreatmentXent ? diag->mean_treatment_xent() : diag->mean_outcome_gap();
          break;
        case Metric::kDEncoder:
        case Metric::kDDecoder:
          if (!balance) balance = discriminator_balance(cegan->model(), d, diag_seed);
          value = metric == Metric::kDEncoder ? balance->encoder_mean : balance->decoder_mean;
          break;
      }
      if (!std::isfinite(value)) throw DivergenceError("non-finite " + to_string(metric));
      out.push_back(MetricValue{split, metric, value});
    }
  }
  return out;
}

RealizationOutput run_realization(const ExperimentSpec& spec, const Dataset* fixed, std::size_t r, const LogFn& log,
                                  std::mutex& log_mutex) {
  const RealizationSeeds seeds = realization_seeds(spec.seed, r);
  const RealizationData data = make_realization_data(spec, fixed, r);
  RealizationOutput out;
  for (MethodId method : spec.methods) {
    const std::uint64_t method_seed = seeds.for_method(method);
    std::string status = "ok";
    try {
      const auto estimator = fit_method(spec, method, data, method_seed);
      out.records.push_back(RealizationRecord{r, method, evaluate(spec, method, *estimator, data, method_seed)});
    } catch (const std::exception& e) {
      out.failures.push_back(MethodFailure{r, method, e.what()});
      status = std::string("failed: ") + e.what();
    }
    if (log) {
      std::lock_guard<std::mutex> lock(log_mutex);
      log("realization " + std::to_string(r) + " " + to_string(method) + " " + status);
    }
  }
  return out;
}

json toy_to_json(const ToyGenConfig& c) { return json{{"n", c.n}, {"dim", c.dim}, {"zeta", c.zeta}}; }

json twins_to_json(const TwinsLikeConfig& c) {
  return json{{"n", c.n},
              {"base_features", c.base_features},
              {"scheme", to_string(c.scheme)},
              {"w_mean", c.w_mean},
              {"w_std", c.w_std},
              {"flip_probability", c.flip_probability},
              {"replicas", c.replicas},
              {"w_o_variance", c.w_o_variance},
              {"w_h_mean", c.w_h_mean},
              {"w_h_variance", c.w_h_variance},
              {"latent_confounding", c.latent_confounding},
              {"outcome_slope", c.outcome_slope},
              {"outcome_bias0", c.outcome_bias0},
              {"outcome_bias1", c.outcome_bias1},
              {"gestation_beta_a", c.gestation_beta_a},
              {"gestation_beta_b", c.gestation_beta_b}};
}

template <typename E>
json name_list(const std::vector<E>& items) {
  json out = json::array();
  for (const E& e : items) out.push_back(to_string(e));
  return out;
}

}  // namespace

std::string to_string(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::kToy: return "toy";
    case GeneratorSpec::Kind::kTwinsLike: return "twins_like";
    case GeneratorSpec::Kind::kCsv: return "csv";
  }
  return "?";
}

RealizationSeeds realization_seeds(std::uint64_t master_seed, std::size_t realization) {
  const Rng stream = Rng(master_seed).child(realization);
  RealizationSeeds s;
  s.data = stream.child(kDataStream).key();
  s.split = stream.child(kSplitStream).key();
  for (std::size_t m = 0; m < s.method.size(); ++m) s.method[m] = stream.child(kMethodStreamBase + m).key();
  return s;
}

TrainConfig method_train_config(const TrainConfig& base, std::uint64_t method_seed) {
  TrainConfig c = base;
  c.seed = Rng(method_seed).child(kTrainStream).key();
  return c;
}

IteConfig method_ite_config(const IteConfig& base, std::uint64_t method_seed) {
  IteConfig c = base;
  c.seed = Rng(method_seed).child(kInferenceStream).key();
  return c;
}

const Dataset& RealizationData::get(Split s) const {
  switch (s) {
    case Split::kInSample: return train;
    case Split::kValidation: return valid;
    case Split::kOutSample: return test;
  }
  return test;
}

RealizationData make_realization_data(const ExperimentSpec& spec, const Dataset* fixed, std::size_t realization) {
  const RealizationSeeds seeds = realization_seeds(spec.seed, realization);
  RealizationData d;
  d.all = generate(spec, fixed, seeds.data);
  const SplitIndices idx = split(d.all.size(), spec.split_fractions, seeds.split);
  d.train = d.all.subset(idx.train);
  d.valid = d.all.subset(idx.valid);
  d.test = d.all.subset(idx.test);
  return d;
}

void GeneratorSpec::validate() const {
  switch (kind) {
    case Kind::kToy: toy.validate(); break;
    case Kind::kTwinsLike: twins.validate(); break;
    case Kind::kCsv:
      if (csv_path.empty()) throw ValidationError("generator.csv.path: must be set");
      if (schema_path.empty()) throw ValidationError("generator.csv.schema: must be set");
      break;
  }
}

json GeneratorSpec::to_json() const {
  switch (kind) {
    case Kind::kToy: return json{{"toy", toy_to_json(toy)}};
    case Kind::kTwinsLike: return json{{"twins_like", twins_to_json(twins)}};
    case Kind::kCsv: return json{{"csv", json{{"path", csv_path}, {"schema", schema_path}}}};
  }
  return json::object();
}

void ExperimentSpec::validate() const {
  generator.validate();
  if (methods.empty()) throw ValidationError("eval.methods: at least one method required");
  if (realizations == 0) throw ValidationError("eval.realizations: must be >= 1");
  if (splits.empty()) throw ValidationError("eval.splits: at least one split required");
  if (metrics.empty()) throw ValidationError("eval.metrics: at least one metric required");
  if (knn_k == 0) throw ValidationError("eval.knn_k: must be >= 1");
  train.validate();
  model.validate();
  ite.validate();
}

json ExperimentSpec::to_json() const {
  json train_json = train.to_json();
  train_json.erase("seed");
  return json{{"seed", seed},
              {"generator", generator.to_json()},
              {"train", train_json},
              {"model", model_config_to_json(model)},
              {"inference", json{{"mc_samples", ite.mc_samples},
                                 {"z_mode", to_string(ite.z_mode)},
                                 {"paired", ite.paired}}},
              {"eval", json{{"methods", name_list(methods)},
                            {"realizations", realizations},
                            {"splits", name_list(splits)},
                            {"metrics", name_list(metrics)},
                            {"split_fractions", split_fractions},
                            {"knn_k", knn_k}}}};
}

std::string ExperimentSpec::fingerprint() const { return fingerprint_hex(to_json().dump()); }

Dataset load_csv_dataset(const GeneratorSpec& generator) {
  const DataSchema schema = read_schema_sidecar(generator.schema_path);
  Dataset d = ingest_csv(generator.csv_path, schema);
  if (!d.has_potential_outcomes()) {
    throw ValidationError("generator.csv.path: dataset has no y0/y1 columns, so effects cannot be scored");
  }
  return d;
}

EvalReport run_experiment(const ExperimentSpec& spec, std::size_t jobs, const LogFn& log) {
  spec.validate();
  std::optional<Dataset> fixed;
  if (spec.generator.kind == GeneratorSpec::Kind::kCsv) fixed = load_csv_dataset(spec.generator);
  const Dataset* fixed_ptr = fixed ? &*fixed : nullptr;

  std::vector<RealizationOutput> outputs(spec.realizations);
  std::vector<std::exception_ptr> errors(spec.realizations);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < spec.realizations; r = next++) {
      try {
        outputs[r] = run_realization(spec, fixed_ptr, r, log, log_mutex);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, spec.realizations);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport report;
  report.config_fingerprint = spec.fingerprint();
  report.realizations = spec.realizations;
  report.methods = spec.methods;
  report.splits = spec.splits;
  report.metrics = spec.metrics;
  for (RealizationOutput& o : outputs) {
    for (RealizationRecord& rec : o.records) report.records.push_back(std::move(rec));
    for (MethodFailure& f : o.failures) report.failures.push_back(std::move(f));
  }
  report.summary = summarize(report.records, report.methods, report.splits, report.metrics);
  return report;
}

std::string to_string(SweepParameter p) { return p == SweepParameter::kZeta ? "zeta" : "flip_probability"; }

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "zeta") return SweepParameter::kZeta;
  if (name == "flip_probability") return SweepParameter::kFlipProbability;
  throw ValidationError("sweep.parameter: unknown parameter '" + name + "'");
}

ExperimentSpec with_parameter(const ExperimentSpec& spec, SweepParameter parameter, double value) {
  ExperimentSpec out = spec;
  if (parameter == SweepParameter::kZeta) {
    if (spec.generator.kind != GeneratorSpec::Kind::kToy) {
      throw ValidationError("sweep.parameter: zeta requires the toy generator");
    }
    out.generator.toy.zeta = value;
  } else {
    if (spec.generator.kind != GeneratorSpec::Kind::kTwinsLike) {
      throw ValidationError("sweep.parameter: flip_probability requires the twins_like generator");
    }
    out.generator.twins.flip_probability = value;
  }
  return out;
}

SweepResult run_sweep(const ExperimentSpec& spec, SweepParameter parameter, const std::vector<double>& values,
                      std::size_t jobs, const LogFn& log) {
  if (values.empty()) throw ValidationError("sweep.values: at least one value required");
  SweepResult out;
  out.parameter = parameter;
  out.values = values;
  for (double v : values) {
    const ExperimentSpec s = with_parameter(spec, parameter, v);
    if (log) {
      std::ostringstream msg;
      msg << to_string(parameter) << " = " << v;
      log(msg.str());
    }
    out.reports.push_back(run_experiment(s, jobs, log));
  }
  return out;
}

}  // namespace cegan
