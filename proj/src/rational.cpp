#include "cat0/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace cat0 {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("bad rational: '" + std::string(whole) + "'");
  std::size_t i = 0;
  bool negative = false;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw std::invalid_argument("bad rational: '" + std::string(whole) + "'");
  std::int64_t value = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad rational: '" + std::string(whole) + "'");
    if (value > (INT64_MAX - 9) / 10) throw std::invalid_argument("rational out of range: '" + std::string(whole) + "'");
    value = value * 10 + (s[i] - '0');
  }
  return negative ? -value : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(trim(s.substr(slash + 1)), text);
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    return Rational(parse_int(trim(s.substr(0, slash)), text), den);
  }
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = s.substr(dot + 1);
    if (frac.size() > 12) throw std::invalid_argument("too many decimals: '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const bool negative = !whole.empty() && whole[0] == '-';
    const std::int64_t int_part = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole, text);
    const std::int64_t frac_part = frac.empty() ? 0 : parse_int(frac, text);
    const Rational magnitude = Rational(negative ? -int_part : int_part) + Rational(frac_part, scale);
    return negative ? -magnitude : magnitude;
  }
  return Rational(parse_int(s, text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::optional<Rational> exact_rational(double x) {
  constexpr double kScale = 1024.0;  // 2^10
  if (!std::isfinite(x) || std::abs(x) > 1e5) return std::nullopt;
  const double scaled = x * kScale;
  if (scaled != std::floor(scaled)) return std::nullopt;
  return Rational(static_cast<std::int64_t>(scaled), static_cast<std::int64_t>(kScale));
}

}  // namespace cat0
