#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cegan/datagen/generators.hpp"
#include "cegan/eval/report.hpp"

namespace cegan {

struct GeneratorSpec {
  enum class Kind { kToy, kTwinsLike, kCsv };
  Kind kind = Kind::kToy;
  ToyGenConfig toy;
  TwinsLikeConfig twins;
  // kCsv: a fixed dataset with y0/y1 columns; realizations then differ only
  // in their splits and training streams.
  std::string csv_path;
  std::string schema_path;

  void validate() const;
  nlohmann::json to_json() const;
};

std::string to_string(GeneratorSpec::Kind kind);

struct ExperimentSpec {
  GeneratorSpec generator;
  std::vector<MethodId> methods{MethodId::kCegan, MethodId::kCeganLp, MethodId::kLr1, MethodId::kLr2,
                                MethodId::kKnn};
  std::size_t realizations = 1;
  std::vector<Split> splits{Split::kInSample, Split::kOutSample};
  std::vector<Metric> metrics{Metric::kSqrtPehe, Metric::kAteError};
  std::array<double, 3> split_fractions = kDefaultSplit;
  TrainConfig train;  // seed is ignored; each realization derives its own
  ModelConfig model;
  IteConfig ite;      // seed is ignored
  std::size_t knn_k = 5;
  std::uint64_t seed = 0;

  void validate() const;
  // Seeds inside the sub-configs are left out: they are derived.
  nlohmann::json to_json() const;
  std::string fingerprint() const;
};

using LogFn = std::function<void(const std::string&)>;

// Seeds of realization r: Rng(master).child(r) supplies child(0) the data,
// child(1) the split and child(2 + method) each method.
struct RealizationSeeds {
  std::uint64_t data = 0;
  std::uint64_t split = 0;
  std::array<std::uint64_t, 5> method{};

  std::uint64_t for_method(MethodId m) const { return method[static_cast<std::size_t>(m)]; }
};
RealizationSeeds realization_seeds(std::uint64_t master_seed, std::size_t realization);

// The training and inference configs a network method runs with inside a
// realization, given that method's seed.
TrainConfig method_train_config(const TrainConfig& base, std::uint64_t method_seed);
IteConfig method_ite_config(const IteConfig& base, std::uint64_t method_seed);

struct RealizationData {
  Dataset all;
  Dataset train;
  Dataset valid;
  Dataset test;

  const Dataset& get(Split s) const;
};

// Generates (or, for kCsv, takes `fixed`) and splits the data of realization r.
RealizationData make_realization_data(const ExperimentSpec& spec, const Dataset* fixed, std::size_t realization);

// Realizations run on up to `jobs` threads; the report does not depend on
// `jobs`. A method that throws is recorded as a failure of that realization.
EvalReport run_experiment(const ExperimentSpec& spec, std::size_t jobs = 1, const LogFn& log = nullptr);

// Loads the dataset of a kCsv generator and checks it has potential outcomes.
Dataset load_csv_dataset(const GeneratorSpec& generator);

enum class SweepParameter { kZeta, kFlipProbability };
std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);

struct SweepResult {
  SweepParameter parameter = SweepParameter::kZeta;
  std::vector<double> values;
  std::vector<EvalReport> reports;  // one per value
};

// Runs the experiment once per value of a generator parameter (zeta for the
// toy generator, flip probability for twins-like), all with the same seed.
SweepResult run_sweep(const ExperimentSpec& spec, SweepParameter parameter, const std::vector<double>& values,
                      std::size_t jobs = 1, const LogFn& log = nullptr);
ExperimentSpec with_parameter(const ExperimentSpec& spec, SweepParameter parameter, double value);

}  // namespace cegan
