#pragma once
// Shared helpers for the unit tests. RNG_SEED seeds the property-test
// generators; the solvers never read it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace testing {

inline std::uint64_t seed() {
  static const std::uint64_t s = [] {
    const char* env = std::getenv("RNG_SEED");
    return env ? std::strtoull(env, nullptr, 10) : 20240611ull;
  }();
  return s;
}

// One generator per test case, derived from the global seed and a tag so
// that adding a test does not perturb the streams of the others.
inline std::mt19937_64 rng(const std::string& tag) {
  std::uint64_t h = seed() ^ 0x9e3779b97f4a7c15ull;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ull;
  return std::mt19937_64(h);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline double log_uniform(std::mt19937_64& g, double lo, double hi) {
  return std::exp(uniform(g, std::log(lo), std::log(hi)));
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace testing
