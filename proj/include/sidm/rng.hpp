#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sidm {

// Uniform double in [0,1) from the top 53 bits of the generator output.
// Bit-portable across platforms, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Standard normal via Box-Muller; two uniforms per draw, no cached state.
inline double normal01(std::mt19937_64& g) {
  const double u1 = 1.0 - uniform01(g);  // (0,1]
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// splitmix64 finalizer; used to derive independent per-run streams as
// seed ⊕ run-index without correlations between adjacent indices.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (stream + 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace sidm
