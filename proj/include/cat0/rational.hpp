#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Under C++20 rewritten comparisons, boost's mixed rational == integer
// template picks its own reversed form and recurses forever. Exact
// non-template overloads win overload resolution and avoid it.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, int b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, long b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, long long b) {
  return a.denominator() == 1 && a.numerator() == b;
}
}  // namespace boost

namespace cat0 {

// Exact lengths: edge weights, word lengths, lattice coordinates and heights.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Accepts "3", "-3/4", "0.125". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

// Recovers an exact rational from a double when it is a dyadic number with a
// small denominator (at most 2^10) and moderate magnitude. Used to route
// containment tests through exact arithmetic when inputs are orbit points.
std::optional<Rational> exact_rational(double x);

// sqrt of a nonnegative rational, as a double.
inline double sqrt_of(const Rational& r) { return std::sqrt(to_double(r)); }

}  // namespace cat0
