#pragma once

#include <string>

#include "pingpong/exact/rational.hpp"

namespace pingpong::places {

using exact::Integer;
using exact::Rational;

// Bits of working precision for outward rounding at the archimedean place.
// Thread-local, so parallel workers can refine independently.
unsigned long working_precision();

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned long bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned long saved_;
};

// Closed real interval with rational endpoints.  Endpoints stay exact until
// their size passes roughly twice the working precision, after which they are
// rounded outward to dyadic rationals, so every operation returns an
// enclosure of the exact result.
class Interval {
 public:
  Interval() = default;
  Interval(const Rational& x) : lo_(x), hi_(x) {}  // NOLINT: point intervals convert freely
  Interval(long x) : lo_(x), hi_(x) {}             // NOLINT
  Interval(const Rational& lo, const Rational& hi);

  static Interval hull(const Interval& a, const Interval& b);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational mid() const;
  Rational width() const { return hi_ - lo_; }
  Rational radius() const { return (hi_ - lo_) / 2; }

  bool is_point() const { return lo_ == hi_; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const { return lo_ <= 0 && hi_ >= 0; }
  bool positive() const { return lo_ > 0; }
  bool negative() const { return hi_ < 0; }

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  // Throws Error(PrecisionExhausted) when the divisor contains zero.
  Interval& operator/=(const Interval& o);

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
  friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }
  friend bool operator==(const Interval&, const Interval&) = default;

  std::string to_string() const;

 private:
  void round_outward();

  Rational lo_{0};
  Rational hi_{0};
};

Interval abs(const Interval& x);
Interval sqr(const Interval& x);
Interval pow(const Interval& x, unsigned long e);
// Exact when the argument is a point and a perfect rational square.
Interval sqrt(const Interval& x);
Interval exp(const Interval& x);
// Requires x > 0.
Interval log(const Interval& x);
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);

// Directed conversions of a rational to a dyadic with `bits` significant bits.
Rational round_down(const Rational& x, unsigned long bits);
Rational round_up(const Rational& x, unsigned long bits);

// p^e for rational e, as an enclosure (exact for integral e).
Interval rational_power(unsigned long p, const Rational& e);

}  // namespace pingpong::places
