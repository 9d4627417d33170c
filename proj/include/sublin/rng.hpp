#pragma once

#include <cstdint>
#include <random>

namespace sublin {

/// Every randomized component draws from this engine.
using Rng = std::mt19937_64;

/// Purpose tags for child streams. Values are part of the reproducibility
/// contract: changing them changes every seeded output.
enum class Stream : std::uint64_t {
  instance = 1,
  plan = 2,
  estimator = 3,
  distinguisher = 4,
  tree_root = 5,
  trial = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for (seed, trial, purpose). Independent of the order in which
/// trials are executed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial,
                                    Stream purpose) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t trial, Stream purpose) {
  return Rng{derive_seed(seed, trial, purpose)};
}

/// Uniform integer in [lo, hi].
template <class Urbg>
std::uint64_t uniform_int(Urbg& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>{lo, hi}(rng);
}

template <class Urbg>
bool bernoulli(Urbg& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution{p}(rng);
}

}  // namespace sublin
