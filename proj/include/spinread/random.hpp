#pragma once

// Reproducible random streams.
//
// One root seed drives everything. Independent per-trial, per-purpose
// streams are derived with derive_seed(), which runs the SplitMix64
// finalizer over (root, trial, purpose). All variates below are computed
// from raw 64-bit engine output with explicit formulas, so sequences are
// bit-identical across standard libraries (std::*_distribution is not).

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace spinread {

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Purposes for which a trial draws a separate stream. Keeping the flip,
/// emission and dark-count processes on disjoint streams means that
/// changing one rate leaves the other processes' draws untouched.
enum class StreamPurpose : std::uint64_t {
  kFlips = 1,
  kEmission = 2,
  kDarkCounts = 3,
  kDecision = 4,
  kPhotonSampling = 5,
  kInitialState = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t trial,
                                    StreamPurpose purpose) {
  const std::uint64_t a = splitmix64(root);
  const std::uint64_t b = splitmix64(a ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
  return splitmix64(b ^ (static_cast<std::uint64_t>(purpose) * 0xd1b54a32d192ed03ULL));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t root, std::uint64_t trial, StreamPurpose purpose)
      : engine_(derive_seed(root, trial, purpose)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  /// Number of failures before the first success of a Bernoulli(p) sequence.
  /// p = 0 returns the maximum representable count.
  std::uint64_t geometric_failures(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
    const double k = std::floor(std::log(uniform_open()) / std::log1p(-p));
    if (k >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(k);
  }

  /// Standard Cauchy variate tan(pi (u - 1/2)).
  double standard_cauchy() {
    return std::tan(3.14159265358979323846 * (uniform_open() - 0.5));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spinread
