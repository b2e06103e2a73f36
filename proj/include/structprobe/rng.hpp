#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace structprobe {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Sub-seed for stream `stream_id` of master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);

/// Portable seeded random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions below are implemented here rather than taken
/// from <random> because the standard distributions are implementation
/// defined, and datasets must be byte-identical across toolchains.
///
/// Stream splitting: `Rng::stream(seed, id)` seeds the engine with
/// `derive_seed(seed, id)`. Generators use one stream per graph index, so the
/// result never depends on scheduling order.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(derive_seed(seed, stream_id));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform integer in [lo, hi] inclusive.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller (one variate per call).
  double normal();

private:
  std::mt19937_64 engine_;
};

/// k distinct values drawn uniformly from [0, n) (Floyd's algorithm),
/// returned in ascending order. Throws if k > n.
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k, Rng& rng);

} // namespace structprobe
