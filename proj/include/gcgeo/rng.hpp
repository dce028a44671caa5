#pragma once

#include <cstdint>

#include "gcgeo/rational.hpp"

namespace gcgeo {

// splitmix64; fixed seeds give reproducible sample points across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  // Uniform integer in [lo, hi].
  long long int_in(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Small nonzero-denominator rational with numerator in [lo, hi].
  Rational rational(long long lo, long long hi, long long den_max = 4) {
    return Rational(BigInt(int_in(lo, hi)), BigInt(int_in(1, den_max)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace gcgeo
