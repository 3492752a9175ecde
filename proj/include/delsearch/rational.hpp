#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace delsearch {

// Exact rational arithmetic for probabilities and enumerated expectations.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Exact: every double is a dyadic rational.
inline Rational rat_from_double(double v) { return Rational(v); }

// mpq_get_d truncates toward zero; round to the nearest double instead.
inline double to_double(const Rational& q) {
  double d0 = q.get_d();
  if (!std::isfinite(d0)) return d0;
  Rational r0 = rat_from_double(d0);
  if (r0 == q) return d0;
  double d1 = std::nextafter(d0, q > r0 ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity());
  Rational e0 = abs(q - r0);
  Rational e1 = abs(rat_from_double(d1) - q);
  return e1 < e0 ? d1 : d0;
}

inline Rational pow_rat(const Rational& base, unsigned exp) {
  Rational acc(1);
  Rational b = base;
  unsigned e = exp;
  while (e != 0) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1u;
  }
  return acc;
}

// Accepts "a/b" or "a" with arbitrary-precision integer parts.
std::optional<Rational> parse_rational(std::string_view text);

inline std::string num_string(const Rational& q) { return q.get_num().get_str(); }
inline std::string den_string(const Rational& q) { return q.get_den().get_str(); }

inline std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return num_string(q);
  return num_string(q) + "/" + den_string(q);
}

}  // namespace delsearch
