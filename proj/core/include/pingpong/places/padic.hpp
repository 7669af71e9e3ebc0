#pragma once

#include <optional>
#include <string>

#include "pingpong/exact/rational.hpp"

namespace pingpong::places {

using exact::Rational;

// p-adic ball center + O(p^N).  An absent precision means the value is the
// exact rational center.  Centers of inexact balls are kept truncated to the
// canonical residue so sizes stay bounded.
class PAdic {
 public:
  PAdic() = default;
  PAdic(unsigned long p, const Rational& exact_value) : p_(p), center_(exact_value) {}
  PAdic(unsigned long p, const Rational& center, long precision);

  unsigned long prime() const { return p_; }
  const Rational& center() const { return center_; }
  const std::optional<long>& precision() const { return prec_; }
  bool is_exact() const { return !prec_.has_value(); }

  // Exact valuation when the ball determines it (v(center) < N).
  std::optional<long> valuation() const;
  // Every element of the ball has valuation >= this.
  long valuation_lower_bound() const;
  // The ball may contain zero.
  bool may_be_zero() const { return !valuation().has_value(); }

  PAdic& operator+=(const PAdic& o);
  PAdic& operator-=(const PAdic& o);
  PAdic& operator*=(const PAdic& o);
  // Throws Error(PrecisionExhausted) when the divisor may be zero.
  PAdic& operator/=(const PAdic& o);
  friend PAdic operator+(PAdic a, const PAdic& b) { return a += b; }
  friend PAdic operator-(PAdic a, const PAdic& b) { return a -= b; }
  friend PAdic operator*(PAdic a, const PAdic& b) { return a *= b; }
  friend PAdic operator/(PAdic a, const PAdic& b) { return a /= b; }
  friend PAdic operator-(PAdic a) {
    a.center_ = -a.center_;
    a.normalize();
    return a;
  }

  std::string to_string() const;

 private:
  void normalize();
  void set_precision(long n);

  unsigned long p_ = 2;
  Rational center_{0};
  std::optional<long> prec_;
};

// Truncates an exact rational to its residue modulo p^n (n may be negative).
Rational truncate_padic(const Rational& x, unsigned long p, long n);

}  // namespace pingpong::places
