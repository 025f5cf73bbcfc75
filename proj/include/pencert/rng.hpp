#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "pencert/types.hpp"

namespace pencert {

/// SplitMix64 stream. Used instead of <random> engines so that seeded runs
/// produce identical samples on every platform and standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double next_double_open() { return 1.0 - next_double(); }

  /// Standard normal via Box-Muller.
  double next_gaussian() {
    double u1 = next_double_open();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stable mix of a seed with a stream index, so independent substreams can be
/// drawn from one user-facing seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 s(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
  return s.next_u64();
}

/// Isotropic gaussian direction, normalized.
inline Vec sample_unit_vector(SplitMix64& rng, int dim) {
  Vec v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.next_gaussian();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

/// Uniform sample of the closed ball of the given radius around center.
inline Vec sample_in_ball(SplitMix64& rng, const Vec& center, double radius) {
  const int n = static_cast<int>(center.size());
  Vec dir = sample_unit_vector(rng, n);
  double r = radius * std::pow(rng.next_double(), 1.0 / n);
  return center + r * dir;
}

}  // namespace pencert
