#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace xview {

/// Self-contained splitmix64 stream. Every random draw in the project goes
/// through this class so that a (seed, purpose) pair always produces the
/// same byte sequence regardless of platform or standard-library version.
/// Gaussian variates use Box-Muller rather than std::normal_distribution,
/// whose algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (fixed algorithm, one variate per call).
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Uniform integer in [0, n), n > 0. Lemire multiply-shift, no modulo bias
  /// worth caring about at 64 bits.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t splitmix_scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from a base seed and a tag. Folding is
/// associative enough for our use: mix_seed(mix_seed(s, a), b) names the
/// (a, b) sub-stream of s. Adding samples to a generator therefore never
/// reshuffles the streams of existing samples.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return detail::splitmix_scramble(seed + 0x9e3779b97f4a7c15ULL * (tag + 1));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  for (std::uint64_t t : tags) seed = mix_seed(seed, t);
  return seed;
}

}  // namespace xview
