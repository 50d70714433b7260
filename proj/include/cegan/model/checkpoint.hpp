#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "cegan/model/cegan_model.hpp"

namespace cegan {

struct Checkpoint {
  CeganModel model;
  std::string train_config_fingerprint;
};

nlohmann::json schema_to_json(const DataSchema& schema);
DataSchema schema_from_json(const nlohmann::json& j);
nlohmann::json model_config_to_json(const ModelConfig& config);

// Self-describing JSON document: schema, model config, every subnetwork's
// spec and parameter tensors (shortest round-trip decimal form), and the
// fingerprint of the training configuration that produced it.
void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws ValidationError on malformed documents and, when expected_schema is
// given, on any disagreement with it.
Checkpoint load_checkpoint(std::istream& in, const std::optional<DataSchema>& expected_schema = std::nullopt);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<DataSchema>& expected_schema = std::nullopt);

}  // namespace cegan
