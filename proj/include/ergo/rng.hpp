#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ergo {

// Deterministic random draws on top of std::mt19937_64.
//
// The standard distribution classes are allowed to differ between standard
// library implementations, which would break bit-identical reproducibility of
// seeded runs. These two helpers pin the exact algorithm instead.

// Uniform draw in [0, 1) using the top 53 bits of one engine output.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Standard normal draw via Box-Muller (polar-free form; two engine outputs).
inline double normal01(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  // Guard against log(0).
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace ergo
