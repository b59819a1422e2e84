#pragma once

#include <cstdint>
#include <vector>

namespace regbp {

/// Counter-based 64-bit generator with split streams.
///
/// Algorithm (pinned so that other implementations can reproduce draws):
///   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///            return z ^ (z >> 31)
///   key    = mix(seed ^ mix(stream + 0xD1B54A32D192ED03))
///   draw i = mix(key + (i + 1) * 0x9E3779B97F4A7C15),  i = 0, 1, 2, ...
/// uniform01 = (draw >> 11) * 2^-53. Integers in [0, k) reject draws at or above
/// the largest multiple of k below 2^64 and return draw mod k. Gaussians use
/// the Marsaglia polar method on u, v = 2*uniform01 - 1, returning u*f first
/// and caching v*f for the next call.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform01();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform on {0, ..., k-1}; k >= 1.
  std::uint64_t below(std::uint64_t k);
  double gaussian();

  /// k distinct elements of pool drawn uniformly (partial Fisher-Yates), in
  /// draw order.
  std::vector<std::size_t> sample(std::vector<std::size_t> pool, std::size_t k);

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace regbp
