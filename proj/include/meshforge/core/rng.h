#pragma once

#include <cstdint>

namespace meshforge {

// Counter-based 64-bit generator (splitmix64 finalizer). Stateless: draw i is
// a pure function of (seed, i), so parallel consumers can sample any index
// without sequencing.
struct CounterRng {
  std::uint64_t seed = 0;

  explicit CounterRng(std::uint64_t s = 0) : seed(s) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t i) const { return mix(mix(seed) ^ mix(i + 0x632BE59BD9B4E019ull)); }

  // Uniform in [0, 1).
  double uniform(std::uint64_t i) const { return static_cast<double>(bits(i) >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t i, std::uint64_t n) const { return bits(i) % n; }
};

}  // namespace meshforge
