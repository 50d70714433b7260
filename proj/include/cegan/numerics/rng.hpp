#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "cegan/numerics/matrix.hpp"

namespace cegan {

// Splittable pseudo-random stream: xoshiro256** seeded through splitmix64.
//
// A stream is identified by a 64-bit key. child(i) derives a new key from
// (key, i) only, so children do not depend on how many values the parent has
// already produced. All conversions to real/normal variates are implemented
// here rather than through <random> distributions, which are not specified
// bit-for-bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng child(std::uint64_t index) const;
  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (pairs are cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);

  Matrix normal_matrix(std::size_t rows, std::size_t cols);

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cegan
