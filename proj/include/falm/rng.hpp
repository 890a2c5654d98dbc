#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace falm {

/// SplitMix64 generator (Steele, Lea & Flood 2014). The state advances by the
/// golden-ratio increment 0x9E3779B97F4A7C15 and the output is mixed with the
/// constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB (shifts 30, 27, 31).
/// Uniform doubles take the top 53 bits; normals use Box-Muller with one draw
/// discarded, so every language that follows these rules reproduces the same
/// stream bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal. Uses u1 in (0, 1] so the log is finite.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace falm
