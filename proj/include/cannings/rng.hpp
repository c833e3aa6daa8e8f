#pragma once

#include <cstdint>
#include <cmath>
#include <limits>

namespace cannings {

// Splitmix64: counter-based 64-bit generator (Steele, Lea & Flood 2014;
// Vigna's fixed-increment variant). State advances by the golden-ratio
// increment, output is an avalanche mix of the counter. Satisfies
// UniformRandomBitGenerator, so it can drive <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform double in (0,1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) via Lemire's multiply-shift rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<__uint128_t>((*this)()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

// Identifies one logical random stream: (master seed, stream index).
struct StreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

namespace detail {
inline std::uint64_t avalanche64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Stream derivation contract: the initial state is an avalanche mix of
// (seed XOR golden-ratio-scaled index). Same spec gives the identical
// stream; distinct indices give statistically independent streams. The
// constants here are frozen; determinism is per build, not per language.
inline SplitMix64 derive_stream(const StreamSpec& spec) {
  std::uint64_t mixed = detail::avalanche64(
      spec.master_seed ^ (spec.stream_index * 0x9E3779B97F4A7C15ULL +
                          0xD1B54A32D192ED03ULL));
  return SplitMix64(mixed);
}

inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
  return derive_stream(StreamSpec{seed, index});
}

// Number of trials up to and including the first success, success
// probability 1-s. Inverse CDF: ceil(ln U / ln s); P(G > g) = s^g.
inline std::int64_t geometric_trials(double s, SplitMix64& rng) {
  if (s <= 0.0) return 1;
  double u = rng.uniform_pos();
  double g = std::ceil(std::log(u) / std::log(s));
  if (g < 1.0) return 1;
  return static_cast<std::int64_t>(g);
}

}  // namespace cannings
