#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace pingpong::exact {

using Integer = mpz_class;
// mpq_class keeps numerator and denominator coprime with a positive
// denominator after every operation.
using Rational = mpq_class;

// Parses "a", "-a", "a/b" with optional surrounding whitespace.  Throws
// Error(ParseError) on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

std::string to_string(const Integer& x);
std::string to_string(const Rational& x);

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// p-adic valuation of a nonzero integer / rational.  v_p(0) is reported as
// std::numeric_limits<long>::max().
constexpr long kInfiniteValuation = std::numeric_limits<long>::max();
long valuation(const Integer& x, unsigned long p);
long valuation(const Rational& x, unsigned long p);

// x = p^v * u with u a p-adic unit; returns u.  Requires x != 0.
Rational unit_part(const Rational& x, unsigned long p);

Rational power(const Rational& x, long e);
Integer power(const Integer& x, unsigned long e);

Rational abs(const Rational& x);

// Floor of log2 |x| for x != 0.
long floor_log2(const Rational& x);

bool is_prime(unsigned long p);

}  // namespace pingpong::exact
