#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace cvwit {

// Deterministic random source. Built on std::mt19937_64 (fully specified by
// the standard) with explicit transforms, so identical seeds reproduce
// identical draws on any platform. Never use std::*_distribution here: their
// output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; draws come in deterministic pairs.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // Complex standard normal: unit total variance, rotationally symmetric.
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865475244, im * 0.7071067811865475244};
  }

  // Magnitude uniform in [0, mag_max], phase uniform in [0, 2pi).
  std::complex<double> uniform_polar(double mag_max) {
    const double mag = uniform(0.0, mag_max);
    const double phase = uniform(0.0, 6.283185307179586476925286766559);
    return std::polar(mag, phase);
  }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// SplitMix64 finalizer; used to derive independent per-stream seeds from a
// base seed and stream/index coordinates.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index) {
  return mix_seed(mix_seed(base ^ 0xa0761d6478bd642fULL) + mix_seed(stream) +
                  0x8ebc6af09c88c6e3ULL * index);
}

}  // namespace cvwit
