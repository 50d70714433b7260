#include "cegan/model/schema.hpp"

#include "cegan/numerics/errors.hpp"

namespace cegan {

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::kBinary ? "binary" : "continuous";
}

FeatureKind parse_feature_kind(std::string_view name) {
  if (name == "binary") return FeatureKind::kBinary;
  if (name == "continuous") return FeatureKind::kContinuous;
  throw ValidationError("unknown feature kind '" + std::string(name) + "'");
}

void DataSchema::validate() const {
  if (x_kinds.empty()) throw ValidationError("schema: x-dim must be >= 1");
  if (y_kinds.empty()) throw ValidationError("schema: y-dim must be >= 1");
}

std::string DataSchema::describe() const {
  std::string s = "x[";
  for (std::size_t i = 0; i < x_kinds.size(); ++i) {
    s += (i ? "," : "") + std::string(x_kinds[i] == FeatureKind::kBinary ? "b" : "c");
  }
  s += "] y[";
  for (std::size_t i = 0; i < y_kinds.size(); ++i) {
    s += (i ? "," : "") + std::string(y_kinds[i] == FeatureKind::kBinary ? "b" : "c");
  }
  return s + "]";
}

DataSchema DataSchema::uniform(std::size_t x_dim, FeatureKind x_kind, std::size_t y_dim, FeatureKind y_kind) {
  return DataSchema{std::vector<FeatureKind>(x_dim, x_kind), std::vector<FeatureKind>(y_dim, y_kind)};
}

}  // namespace cegan
