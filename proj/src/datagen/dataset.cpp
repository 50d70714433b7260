#include "cegan/datagen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cegan/numerics/rng.hpp"

namespace cegan {
namespace {

void check_binary_column(const Matrix& m, Eigen::Index c, const std::string& name) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double v = m(r, c);
    if (v != 0.0 && v != 1.0) {
      throw ValidationError("dataset: binary column " + name + " has value " + std::to_string(v) + " at row " +
                            std::to_string(r));
    }
  }
}

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

}  // namespace

void Dataset::validate() const {
  schema.validate();
  const Eigen::Index n = x.rows();
  require_shape(x, n, schema.x_dim(), "dataset x");
  require_shape(y, n, schema.y_dim(), "dataset y");
  if (t.size() != n) throw ShapeError("dataset: t length != row count");
  if (y0.has_value() != y1.has_value()) throw ValidationError("dataset: y0 and y1 must be given together");
  if (!x.allFinite() || !t.allFinite() || !y.allFinite()) throw ValidationError("dataset: non-finite value");
  for (std::size_t c = 0; c < schema.x_dim(); ++c) {
    if (schema.x_kinds[c] == FeatureKind::kBinary) check_binary_column(x, c, "x" + std::to_string(c));
  }
  for (std::size_t c = 0; c < schema.y_dim(); ++c) {
    if (schema.y_kinds[c] == FeatureKind::kBinary) check_binary_column(y, c, "y" + std::to_string(c));
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (t(r) != 0.0 && t(r) != 1.0) {
      throw ValidationError("dataset: treatment must be 0/1, got " + std::to_string(t(r)) + " at row " +
                            std::to_string(r));
    }
  }
  if (has_potential_outcomes()) {
    require_shape(*y0, n, schema.y_dim(), "dataset y0");
    require_shape(*y1, n, schema.y_dim(), "dataset y1");
    if (!y0->allFinite() || !y1->allFinite()) throw ValidationError("dataset: non-finite potential outcome");
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& chosen = t(r) == 1.0 ? *y1 : *y0;
      if (chosen.row(r) != y.row(r)) {
        throw ValidationError("dataset: factual outcome disagrees with potential outcome at row " + std::to_string(r));
      }
    }
  }
  if (z_true && (z_true->rows() != n || !z_true->allFinite())) throw ValidationError("dataset: bad z_true");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.schema = schema;
  d.x = take_rows(x, rows);
  d.y = take_rows(y, rows);
  d.t.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) d.t(i) = t(rows[i]);
  if (y0) d.y0 = take_rows(*y0, rows);
  if (y1) d.y1 = take_rows(*y1, rows);
  if (z_true) d.z_true = take_rows(*z_true, rows);
  return d;
}

bool Dataset::operator==(const Dataset& o) const {
  auto same_opt = [](const std::optional<Matrix>& a, const std::optional<Matrix>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->rows() == b->rows() && a->cols() == b->cols() && *a == *b);
  };
  auto same = [](const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; };
  return schema == o.schema && same(x, o.x) && t.size() == o.t.size() && t == o.t && same(y, o.y) &&
         same_opt(y0, o.y0) && same_opt(y1, o.y1) && same_opt(z_true, o.z_true);
}

SplitIndices split(std::size_t n, const std::array<double, 3>& fractions, std::uint64_t seed) {
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("split: fractions must sum to 1");
  for (double f : fractions) {
    if (!(f > 0.0)) throw ValidationError("split: fractions must be positive");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n)));
  const auto n_valid = static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n)));
  if (n_train == 0 || n_valid == 0 || n_train + n_valid >= n) {
    throw ValidationError("split: an empty partition results at N=" + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.valid.assign(order.begin() + n_train, order.begin() + n_train + n_valid);
  s.test.assign(order.begin() + n_train + n_valid, order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.valid.begin(), s.valid.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Vector minmax_normalize(const Vector& column) {
  if (column.size() == 0) throw ValidationError("minmax_normalize: empty column");
  const double lo = column.minCoeff();
  const double hi = column.maxCoeff();
  if (!(lo < hi)) throw ValidationError("minmax_normalize: constant column");
  return (column.array() - lo) / (hi - lo);
}

}  // namespace cegan
