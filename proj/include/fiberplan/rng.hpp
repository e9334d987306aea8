#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fiberplan {

/// Counter-based generator: draw j of stream s under seed k is
/// splitmix64(k * C1 + s * C2 + j), so any draw can be reproduced in
/// isolation and results do not depend on evaluation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(seed * 0x9E3779B97F4A7C15ULL ^ mix(stream + 0x632BE59BD9B4E019ULL)) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t j) const { return mix(key_ + j * 0xD1B54A32D192ED03ULL); }

  /// (0, 1], 53-bit resolution
  double uniform(std::uint64_t j) const { return (static_cast<double>(bits(j) >> 11) + 1.0) * 0x1.0p-53; }

  /// Circular complex Gaussian with E|z|^2 = 1 (Box-Muller on draws 2j, 2j+1).
  std::complex<double> complex_normal(std::uint64_t j) const {
    const double r = std::sqrt(-std::log(uniform(2 * j)));
    const double t = 6.283185307179586 * uniform(2 * j + 1);
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::uint64_t key_;
};

}  // namespace fiberplan
