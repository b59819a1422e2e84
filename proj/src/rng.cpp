#include "regbp/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "regbp/error.hpp"

namespace regbp {

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0xD1B54A32D192ED03ULL))) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t Rng::below(std::uint64_t k) {
  if (k == 0) throw DomainError("Rng::below: empty range");
  // 2^64 mod k, computed without overflow.
  const std::uint64_t excess = (0 - k) % k;
  const std::uint64_t limit = 0 - excess;  // largest multiple of k, mod 2^64 (0 means 2^64)
  for (;;) {
    const std::uint64_t x = next_u64();
    if (excess == 0 || x < limit) return x % k;
  }
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  for (;;) {
    const double u = 2.0 * uniform01() - 1.0;
    const double v = 2.0 * uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double f = std::sqrt(-2.0 * std::log(s) / s);
      spare_ = v * f;
      has_spare_ = true;
      return u * f;
    }
  }
}

std::vector<std::size_t> Rng::sample(std::vector<std::size_t> pool, std::size_t k) {
  if (k > pool.size()) throw DomainError("Rng::sample: k exceeds pool size");
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace regbp
