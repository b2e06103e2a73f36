#include "structprobe/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace structprobe {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(seed) ^ stream_id);
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Largest multiple of bound representable in 64 bits; draws at or above it
  // are rejected so every residue is equally likely.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return x % bound;
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  if (lo == 0 && hi == std::numeric_limits<std::uint64_t>::max()) return engine_();
  return lo + uniform_below(hi - lo + 1);
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01(); // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k);
  std::vector<std::uint64_t> out;
  out.reserve(k);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = rng.uniform_below(j + 1);
    const std::uint64_t pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace structprobe
