#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "pingpong/exact/prime_support.hpp"
#include "pingpong/places/interval.hpp"

namespace pingpong::places {

// The archimedean place (prime 0) or a prime p.  Ordered with infinity first.
struct Place {
  unsigned long p = 0;

  static Place infinity() { return Place{0}; }
  static Place prime(unsigned long q) { return Place{q}; }
  bool is_infinite() const { return p == 0; }
  std::string to_string() const { return p == 0 ? "inf" : std::to_string(p); }
  // Accepts "inf" or a prime.
  static Place parse(const std::string& text);

  friend bool operator==(const Place&, const Place&) = default;
  friend auto operator<=>(const Place&, const Place&) = default;
};

// Infinity followed by the primes of the support.
std::vector<Place> places_of(const exact::PrimeSupport& support);

// A nonnegative real magnitude attached to a place.  `value` always encloses
// the true number.  At a prime, `log_p` is set when the value is exactly
// p^{log_p}; exponents may be fractional (root valuations from a Newton
// polygon).  A p-adic value that is only bounded above has value [0, p^k] and
// no exponent.
struct LocalScalar {
  Place place;
  Interval value;
  std::optional<Rational> log_p;

  static LocalScalar at_infinity(const Interval& v) { return LocalScalar{Place::infinity(), v, {}}; }
  static LocalScalar p_power(unsigned long p, const Rational& exponent);
  static LocalScalar zero(Place place) { return LocalScalar{place, Interval(0L), {}}; }
  // p-adic value bounded by p^exponent.
  static LocalScalar p_bound(unsigned long p, const Rational& exponent);

  bool is_exact() const { return log_p.has_value() || value.is_point(); }
  std::string to_string() const;
};

LocalScalar operator*(const LocalScalar& a, const LocalScalar& b);
LocalScalar operator/(const LocalScalar& a, const LocalScalar& b);
LocalScalar max(const LocalScalar& a, const LocalScalar& b);
LocalScalar min(const LocalScalar& a, const LocalScalar& b);
LocalScalar sqrt(const LocalScalar& a);
LocalScalar pow(const LocalScalar& a, unsigned long e);

enum class Verdict { True, False, Undecided };
enum class Relation { Lt, Le, Gt, Ge };

std::string_view to_string(Verdict v);
std::string_view to_string(Relation r);
Relation parse_relation(std::string_view text);

// True/False only when the enclosures prove it.  Equal point values satisfy
// Le and Ge.
Verdict compare(const LocalScalar& x, const LocalScalar& y, Relation rel);
Verdict compare(const Interval& x, const Interval& y, Relation rel);

// |x|_v: exact at every place (a point interval at infinity).
LocalScalar abs_at(const Rational& x, Place v);

}  // namespace pingpong::places
