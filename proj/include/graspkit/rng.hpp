#pragma once

#include <cstdint>
#include <random>

namespace graspkit {

/// Seeded random source with reproducible output. The raw stream is
/// std::mt19937_64 (a fixed, standardized algorithm); the int/double mappings
/// below are implemented here because the standard distributions are not
/// bit-stable across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], unbiased via bitmask rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
    if (span == 0) return lo;
    std::uint64_t mask = span;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t draw;
    do {
      draw = gen_() & mask;
    } while (draw > span);
    return lo + static_cast<std::int64_t>(draw);
  }

 private:
  std::mt19937_64 gen_;
};

/// SplitMix64 finalizer; used to derive independent per-item seeds from a
/// base seed without correlating the resulting mt19937_64 streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace graspkit
