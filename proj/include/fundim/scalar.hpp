#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

namespace fundim {

// Exact rational scalar. Arithmetic keeps values canonical, but the
// two-argument mpq_class constructor does not; build fractions with ratio().
using Rational = mpq_class;

inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

enum class ScalarMode { kRational, kFloat };

inline constexpr double kDefaultZeroTol = 1e-12;

std::string_view to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view text);

// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument otherwise.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

// Exact conversion of a finite double (every double is a dyadic rational).
Rational rational_from_double(double value);

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr ScalarMode kMode = ScalarMode::kRational;
  static constexpr bool kExact = true;

  static int sign(const Rational& v, double /*zero_tol*/) { return sgn(v); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational from_rational(const Rational& v) { return v; }
};

template <>
struct ScalarTraits<double> {
  static constexpr ScalarMode kMode = ScalarMode::kFloat;
  static constexpr bool kExact = false;

  static int sign(double v, double zero_tol) {
    if (std::abs(v) <= zero_tol) return 0;
    return v > 0 ? 1 : -1;
  }
  static double to_double(double v) { return v; }
  static double from_rational(const Rational& v) { return v.get_d(); }
};

template <class T>
inline T relu(const T& v) {
  return v > 0 ? v : T(0);
}

}  // namespace fundim
