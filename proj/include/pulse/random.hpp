#pragma once

// Seeded sampling on top of std::mt19937_64. The engine's output sequence is
// fixed by the standard; the standard distributions are not, so the samplers
// here are written out to keep generated traces identical across toolchains.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace pulse {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  /// Independent stream derived from a parent seed and a purpose tag.
  static Rng derived(std::uint64_t seed, std::uint64_t tag) { return Rng(splitmix64(seed) ^ splitmix64(tag + 1)); }

  std::uint64_t next() { return eng_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Poisson variate; large means are split into chunks of at most 30.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 0.0) {
      double chunk = mean > 30.0 ? 30.0 : mean;
      mean -= chunk;
      double limit = std::exp(-chunk);
      double p = uniform01();
      while (p > limit) {
        ++total;
        p *= uniform01();
      }
    }
    return total;
  }

  /// Triangular(lo, mode, hi) by CDF inversion.
  double triangular(double lo, double mode, double hi) {
    if (hi <= lo) return lo;
    double u = uniform01();
    double split = (mode - lo) / (hi - lo);
    if (u < split) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
    return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
  }

  template <class T>
  const T& pick(std::span<const T> items) {
    return items[static_cast<std::size_t>(below(items.size()))];
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pulse
