#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cegan/eval/experiment.hpp"

namespace cegan {

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kZeta;
  std::vector<double> values;
};

// One JSON document drives every command:
//   {"seed": 1, "output_dir": "out",
//    "generator": {"toy": {...}} | {"twins_like": {...}} | {"csv": {"path": ..., "schema": ...}},
//    "train": {...}, "model": {...}, "inference": {...},
//    "eval": {"methods": [...], "realizations": 10, "metrics": [...], "splits": [...]},
//    "sweep": {"parameter": "zeta", "values": [0, 1, 3, 5]}}
// Every section except "generator" is optional. Unknown keys are rejected.
struct ExperimentConfig {
  ExperimentSpec spec;
  std::string output_dir = "out";
  std::optional<SweepSpec> sweep;
};

// Relative paths are resolved against base_dir. Throws ValidationError naming
// the offending field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace cegan
