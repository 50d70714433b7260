#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cegan/datagen/dataset.hpp"
#include "cegan/model/cegan_model.hpp"
#include "cegan/numerics/rng.hpp"

namespace fixtures {

inline cegan::ModelConfig tiny_config(std::size_t latent = 2, double dropout = 0.0) {
  cegan::ModelConfig c;
  c.set_latent_dim(latent);
  c.hidden_dims = {4, 4};
  c.propensity_hidden_dims = {4, 4};
  c.dropout_rate = dropout;
  return c;
}

inline cegan::CeganModel tiny_model(const cegan::DataSchema& schema, std::uint64_t seed, std::size_t latent = 2,
                                    double dropout = 0.0) {
  cegan::Rng init(seed);
  return cegan::make_cegan_model(schema, tiny_config(latent, dropout), init);
}

inline void zero_group(cegan::CeganModel& m, cegan::ParamGroup g) {
  for (auto& l : m.group(g).params.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

inline void zero_all(cegan::CeganModel& m) {
  for (cegan::ParamGroup g : cegan::kAllParamGroups) zero_group(m, g);
}

// Schema-valid random records; binary columns are fair coins, continuous
// columns standard normal. No potential outcomes.
inline cegan::Dataset random_dataset(const cegan::DataSchema& schema, std::size_t n, std::uint64_t seed) {
  cegan::Rng rng(seed);
  cegan::Dataset d{schema, cegan::Matrix(n, schema.x_dim()), cegan::Vector(n), cegan::Matrix(n, schema.y_dim()),
                   {}, {}, {}};
  auto fill = [&](cegan::Matrix& m, const std::vector<cegan::FeatureKind>& kinds) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = kinds[c] == cegan::FeatureKind::kBinary ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.normal();
      }
    }
  };
  fill(d.x, schema.x_kinds);
  fill(d.y, schema.y_kinds);
  for (std::size_t i = 0; i < n; ++i) d.t(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return d;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("cegan_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
