#pragma once

#include <string>
#include <vector>

#include "fundim/funcdim.hpp"
#include "fundim/network.hpp"
#include "fundim/worked_examples.hpp"

namespace fundim::testing {

inline Rational q(const std::string& s) { return parse_rational(s); }

inline std::vector<Rational> qv(std::initializer_list<const char*> xs) {
  std::vector<Rational> v;
  for (const char* x : xs) v.push_back(parse_rational(x));
  return v;
}

// One-input batch from scalar strings.
inline Batch<Rational> batch1(std::initializer_list<const char*> xs) {
  Batch<Rational> z;
  for (const char* x : xs) z.push_back({parse_rational(x)});
  return z;
}

inline RationalParameter net(const std::vector<size_t>& widths,
                             const std::vector<std::string>& flat) {
  return worked::make(widths, flat);
}

template <class T>
std::span<const T> sp(const std::vector<T>& v) {
  return std::span<const T>(v);
}

}  // namespace fundim::testing
