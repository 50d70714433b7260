#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cegan/model/schema.hpp"
#include "cegan/numerics/matrix.hpp"

namespace cegan {

// Observational records (x, t, y), optionally with both potential outcomes
// and the latent variables that generated them.
struct Dataset {
  DataSchema schema;
  Matrix x;
  Vector t;
  Matrix y;
  std::optional<Matrix> y0;
  std::optional<Matrix> y1;
  std::optional<Matrix> z_true;

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  bool has_potential_outcomes() const { return y0.has_value() && y1.has_value(); }
  // Shapes, {0,1} binary columns, finiteness, and factual consistency
  // y == (t ? y1 : y0) when potential outcomes are present.
  void validate() const;
  Dataset subset(std::span<const std::size_t> rows) const;
  bool operator==(const Dataset& other) const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

inline constexpr std::array<double, 3> kDefaultSplit = {0.64, 0.16, 0.20};

// Seeded random partition of [0, n) with sizes round(f0 n), round(f1 n) and
// the remainder. Throws ValidationError when any part would be empty.
SplitIndices split(std::size_t n, const std::array<double, 3>& fractions, std::uint64_t seed);

// (v - min) / (max - min); rejects constant columns.
Vector minmax_normalize(const Vector& column);

}  // namespace cegan
