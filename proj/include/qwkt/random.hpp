#pragma once

// Reproducible random numbers. The generator is xoshiro256** seeded through
// splitmix64, and the binomial sampler is defined here rather than taken
// from <random>, so a seed determines the same counts on every platform.

#include <array>
#include <cstdint>
#include <limits>

namespace qwkt {

/// xoshiro256** (Blackman & Vigna). State update:
///   result = rotl(s1 * 5, 7) * 9
///   t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
/// The four state words are the first four outputs of splitmix64(seed).
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Binomial(n, p) draw. Inversion for n·min(p, 1-p) < 10, otherwise
/// Hörmann's BTRS transformed rejection.
std::uint64_t sample_binomial(Xoshiro256& rng, std::uint64_t n, double p);

}  // namespace qwkt
