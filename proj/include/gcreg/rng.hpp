#pragma once

#include <cmath>
#include <cstdint>

namespace gcreg {

namespace detail {

// SplitMix64 finalizer. Used for seed derivation and for expanding a
// 64-bit seed into engine state.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Derives an independent stream seed from a master seed and one or two
/// stream tags. Stable across platforms and calls.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = detail::mix64(master ^ 0x6a09e667f3bcc909ULL);
  s = detail::mix64(s ^ detail::mix64(a ^ 0xbb67ae8584caa73bULL));
  s = detail::mix64(s ^ detail::mix64(b ^ 0x3c6ef372fe94f82bULL));
  return s;
}

/// xoshiro256++ with SplitMix64 state expansion. The engine and the
/// uniform/normal transforms below are fully specified here, so streams
/// are reproducible bit-for-bit on any platform (the standard library
/// distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm = detail::mix64(sm);
      word = sm;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Standard normal via Box-Muller (one variate per call).
  double normal() {
    double u1 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = next_double();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  /// Integer in [0, bound) without modulo bias (bound > 0).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Independent child stream.
  Rng fork(std::uint64_t tag) {
    return Rng(derive_seed(next_u64(), tag));
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace gcreg
