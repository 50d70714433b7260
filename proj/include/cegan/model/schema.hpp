#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cegan {

enum class FeatureKind { kBinary, kContinuous };

std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view name);

// Column kinds of the observed data. Treatment is always binary and is not
// listed.
struct DataSchema {
  std::vector<FeatureKind> x_kinds;
  std::vector<FeatureKind> y_kinds;

  std::size_t x_dim() const { return x_kinds.size(); }
  std::size_t y_dim() const { return y_kinds.size(); }
  void validate() const;
  std::string describe() const;
  bool operator==(const DataSchema&) const = default;

  static DataSchema uniform(std::size_t x_dim, FeatureKind x_kind, std::size_t y_dim, FeatureKind y_kind);
};

}  // namespace cegan
