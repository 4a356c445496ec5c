#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "sbt/types.hpp"

namespace sbt {

/// Counter-based SplitMix64 stream.
///
/// The i-th output of a stream is `mix64(key + (i + 1) * kGamma)`, where
/// `mix64` is the SplitMix64 finalizer and the key is derived from a
/// (seed, stream index) pair.  Streams for independent trials are obtained
/// with `split(index)`, so results depend only on (seed, index) and never
/// on the order in which trials are scheduled.
///
/// All distributions below are implemented here rather than through
/// <random> so that outputs are identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Child stream keyed by this stream's key and `index`; does not advance
  /// this stream.
  Rng split(std::uint64_t index) const { return Rng(key_, index + 1); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform on (0, 1].
  double uniform_open0() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Uniform integer on [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling for an unbiased draw.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  /// Standard normal via Box-Muller (one output per pair, no cached state).
  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  Vector normal_vector(Eigen::Index d) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sbt
