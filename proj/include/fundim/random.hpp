#pragma once

// Seeded random streams. Each (seed, stream) pair yields an independent
// mt19937_64 engine; the distributions are implemented here rather than taken
// from <random> so that draws are identical across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

#include "fundim/scalar.hpp"

namespace fundim {

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  // Uniform on the grid {k / denom} intersected with [lo, hi].
  Rational dyadic(std::int64_t lo, std::int64_t hi, std::int64_t denom);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr std::int64_t kGridDenominator = 64;

// Random entries: dyadic rationals in [-bound, bound] with denominator 64, or
// uniform doubles on the same interval.
template <class T>
T random_entry(Rng& rng, std::int64_t bound = 2) {
  if constexpr (ScalarTraits<T>::kExact) {
    return rng.dyadic(-bound, bound, kGridDenominator);
  } else {
    return rng.uniform(-static_cast<double>(bound), static_cast<double>(bound));
  }
}

// Random input: grid point of [-box, box]^n (exact) or standard Gaussian
// (float). positive folds every coordinate into [0, inf).
template <class T>
std::vector<T> random_point(Rng& rng, size_t n, std::int64_t box = 10, bool positive = false) {
  std::vector<T> x(n);
  for (auto& v : x) {
    if constexpr (ScalarTraits<T>::kExact) {
      v = rng.dyadic(-box, box, kGridDenominator);
    } else {
      v = rng.normal();
    }
    if (positive && v < 0) v = -v;
  }
  return x;
}

}  // namespace fundim
