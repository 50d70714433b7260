#include "cegan/datagen/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cegan/model/checkpoint.hpp"

namespace cegan {
namespace {

std::vector<std::string> outcome_names(const std::string& stem, std::size_t y_dim) {
  if (y_dim == 1) return {stem};
  std::vector<std::string> out;
  for (std::size_t j = 0; j < y_dim; ++j) out.push_back(stem + "_" + std::to_string(j));
  return out;
}

std::vector<std::string> base_header(const DataSchema& schema) {
  std::vector<std::string> h;
  for (std::size_t j = 0; j < schema.x_dim(); ++j) h.push_back("x" + std::to_string(j));
  h.push_back("t");
  for (auto& s : outcome_names("y", schema.y_dim())) h.push_back(s);
  return h;
}

void append_number(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::string> csv_header(const Dataset& dataset) {
  std::vector<std::string> h = base_header(dataset.schema);
  if (dataset.has_potential_outcomes()) {
    for (auto& s : outcome_names("y0", dataset.schema.y_dim())) h.push_back(s);
    for (auto& s : outcome_names("y1", dataset.schema.y_dim())) h.push_back(s);
    if (dataset.z_true) {
      for (Eigen::Index j = 0; j < dataset.z_true->cols(); ++j) h.push_back("z" + std::to_string(j));
    }
  }
  return h;
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  const auto header = csv_header(dataset);
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) line += (i ? "," : "") + header[i];
  out << line << '\n';
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    line.clear();
    auto put = [&](double v) {
      if (!line.empty()) line += ',';
      append_number(line, v);
    };
    for (Eigen::Index c = 0; c < dataset.x.cols(); ++c) put(dataset.x(r, c));
    put(dataset.t(r));
    for (Eigen::Index c = 0; c < dataset.y.cols(); ++c) put(dataset.y(r, c));
    if (dataset.has_potential_outcomes()) {
      for (Eigen::Index c = 0; c < dataset.y.cols(); ++c) put((*dataset.y0)(r, c));
      for (Eigen::Index c = 0; c < dataset.y.cols(); ++c) put((*dataset.y1)(r, c));
      if (dataset.z_true) {
        for (Eigen::Index c = 0; c < dataset.z_true->cols(); ++c) put((*dataset.z_true)(r, c));
      }
    }
    out << line << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset_csv(out, dataset);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_schema_sidecar(const std::filesystem::path& path, const DataSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << schema_to_json(schema).dump(1) << '\n';
}

DataSchema read_schema_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open schema sidecar " + path.string());
  try {
    return schema_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("schema sidecar " + path.string() + ": " + e.what());
  }
}

Dataset ingest_csv(std::istream& in, const DataSchema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_fields(line);

  const std::vector<std::string> required = base_header(schema);
  if (header.size() < required.size() || !std::equal(required.begin(), required.end(), header.begin())) {
    throw ValidationError("csv: header must start with " + [&] {
      std::string s;
      for (std::size_t i = 0; i < required.size(); ++i) s += (i ? "," : "") + required[i];
      return s;
    }());
  }
  const std::size_t dy = schema.y_dim();
  bool has_po = false;
  std::size_t z_cols = 0;
  std::size_t at = required.size();
  if (header.size() > at) {
    const auto y0n = outcome_names("y0", dy);
    const auto y1n = outcome_names("y1", dy);
    for (std::size_t j = 0; j < dy; ++j) {
      if (at + j >= header.size() || header[at + j] != y0n[j]) throw ValidationError("csv: expected column " + y0n[j]);
      if (at + dy + j >= header.size() || header[at + dy + j] != y1n[j]) {
        throw ValidationError("csv: expected column " + y1n[j]);
      }
    }
    has_po = true;
    at += 2 * dy;
    for (; at < header.size(); ++at, ++z_cols) {
      if (header[at] != "z" + std::to_string(z_cols)) throw ValidationError("csv: unexpected column " + header[at]);
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " + header[c] +
                              ": cannot parse '" + f + "'");
      }
      if (!std::isfinite(values[c])) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " + header[c] + ": non-finite value");
      }
    }
    auto check_binary = [&](std::size_t c) {
      if (values[c] != 0.0 && values[c] != 1.0) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " + header[c] +
                              ": binary column holds " + fields[c]);
      }
    };
    for (std::size_t j = 0; j < schema.x_dim(); ++j) {
      if (schema.x_kinds[j] == FeatureKind::kBinary) check_binary(j);
    }
    check_binary(schema.x_dim());
    for (std::size_t j = 0; j < dy; ++j) {
      if (schema.y_kinds[j] == FeatureKind::kBinary) {
        check_binary(schema.x_dim() + 1 + j);
        if (has_po) {
          check_binary(required.size() + j);
          check_binary(required.size() + dy + j);
        }
      }
    }
    rows.push_back(std::move(values));
  }

  const std::size_t n = rows.size();
  const std::size_t dx = schema.x_dim();
  Dataset ds;
  ds.schema = schema;
  ds.x.resize(n, dx);
  ds.t.resize(n);
  ds.y.resize(n, dy);
  if (has_po) {
    ds.y0 = Matrix(n, dy);
    ds.y1 = Matrix(n, dy);
    if (z_cols > 0) ds.z_true = Matrix(n, z_cols);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto& v = rows[r];
    for (std::size_t j = 0; j < dx; ++j) ds.x(r, j) = v[j];
    ds.t(r) = v[dx];
    for (std::size_t j = 0; j < dy; ++j) ds.y(r, j) = v[dx + 1 + j];
    if (has_po) {
      for (std::size_t j = 0; j < dy; ++j) {
        (*ds.y0)(r, j) = v[required.size() + j];
        (*ds.y1)(r, j) = v[required.size() + dy + j];
      }
      for (std::size_t j = 0; j < z_cols; ++j) (*ds.z_true)(r, j) = v[required.size() + 2 * dy + j];
    }
  }
  ds.validate();
  return ds;
}

Dataset ingest_csv(const std::filesystem::path& path, const DataSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open dataset " + path.string());
  return ingest_csv(in, schema);
}

}  // namespace cegan
