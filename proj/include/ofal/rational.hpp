#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ofal {

/// Exact coordinate and cost type. All positions, distances and ratios
/// are kept in canonical form; no floating point enters a comparison.
using Rational = mpq_class;

/// Parses "7", "-3/4", "0.125", "1.5e-3". Throws ofal::Error on junk.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when integral).
std::string format_rational(const Rational& value);

/// Decimal approximation with the given number of significant digits.
std::string format_decimal(const Rational& value, int significant_digits = 12);

/// num/den in canonical form (the two-argument mpq constructor does not reduce).
inline Rational ratio(long num, long den) {
  Rational value(num, den);
  value.canonicalize();
  return value;
}

inline Rational distance(const Rational& a, const Rational& b) {
  Rational d = a - b;
  return abs(d);
}

/// Largest 10^-m (m >= 1) for which pred holds; pred must stay true for
/// every smaller positive value once it holds. Returns 0 if none is found.
template <class Pred>
Rational largest_decimal_power_satisfying(Pred&& pred, int max_exponent = 200) {
  Rational value(1, 10);
  for (int m = 1; m <= max_exponent; ++m) {
    if (pred(value)) return value;
    value /= 10;
  }
  return Rational(0);
}

}  // namespace ofal
