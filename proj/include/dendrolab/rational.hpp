#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

#include "dendrolab/error.hpp"

namespace dendrolab {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

namespace detail {
inline bool all_digits(std::string_view s)
{
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}
} // namespace detail

/// Parses "p/q" or "p" (optional leading minus on p). Throws FormatError.
inline Rational parse_rational(std::string_view text)
{
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!detail::all_digits(num) || !detail::all_digits(den))
    throw FormatError("not a rational: '" + std::string(text) + "'");
  Integer n{std::string(num)};
  Integer d{std::string(den)};
  if (d == 0) throw FormatError("zero denominator: '" + std::string(text) + "'");
  Rational q(n, d);
  return negative ? Rational(-q) : q;
}

/// Always "num/den", including integers ("2/1").
inline std::string format_rational(const Rational& q)
{
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Smallest integer >= q.
inline Integer ceil_int(const Rational& q)
{
  Integer n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  Integer f = n / d;
  if (f * d != n && n > 0) f += 1;
  return f;
}

} // namespace dendrolab
