#include "cegan/numerics/matrix.hpp"

#include <cmath>
#include <string>

namespace cegan {

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, std::string_view what) {
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

Matrix hconcat(std::initializer_list<const Matrix*> blocks) {
  Eigen::Index rows = -1;
  Eigen::Index cols = 0;
  for (const Matrix* b : blocks) {
    if (rows < 0) rows = b->rows();
    if (b->rows() != rows) {
      throw ShapeError("hconcat: row mismatch (" + std::to_string(rows) + " vs " +
                       std::to_string(b->rows()) + ")");
    }
    cols += b->cols();
  }
  Matrix out(rows < 0 ? 0 : rows, cols);
  Eigen::Index at = 0;
  for (const Matrix* b : blocks) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return out;
}

Matrix as_column(const Vector& v) {
  Matrix m(v.size(), 1);
  m.col(0) = v;
  return m;
}

}  // namespace cegan
