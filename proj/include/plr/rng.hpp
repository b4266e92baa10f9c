#pragma once

#include <cmath>
#include <cstdint>

namespace plr::rng {

// Counter-based splitmix64: the value at a given counter depends only on
// (seed, counter), so streams can be evaluated in any order or in parallel.
inline std::uint64_t split(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform in (0, 1]; never zero, safe under log().
inline double uniform_open(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>((split(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

// Uniform in [0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(split(seed, counter) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller, one variate per counter.
inline double normal(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = uniform_open(seed, 2 * counter);
  const double u2 = uniform(seed, 2 * counter + 1);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Small sequential generator for tests and sampling loops.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return split(seed_, counter_++); }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double value = rng::normal(seed_, counter_);
    ++counter_;
    return value;
  }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace plr::rng
