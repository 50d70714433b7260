#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cegan/datagen/dataset.hpp"

namespace cegan {

// Column names for a schema: x0..x{d-1}, t, y[, y0, y1[, z0..]]. With more
// than one outcome column the outcome names become y_j, y0_j, y1_j.
std::vector<std::string> csv_header(const Dataset& dataset);

// Values are written in shortest round-trip decimal form, LF line endings.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);

// Schema sidecar: {"x_kinds": [...], "y_kinds": [...]}.
void write_schema_sidecar(const std::filesystem::path& path, const DataSchema& schema);
DataSchema read_schema_sidecar(const std::filesystem::path& path);

// Parses and validates a dataset. Throws ValidationError with the offending
// line number and column name on malformed input.
Dataset ingest_csv(std::istream& in, const DataSchema& schema);
Dataset ingest_csv(const std::filesystem::path& path, const DataSchema& schema);

}  // namespace cegan
