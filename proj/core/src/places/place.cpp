#include "pingpong/places/place.hpp"

#include "pingpong/error.hpp"

namespace pingpong::places {

Place Place::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return infinity();
  try {
    std::size_t used = 0;
    unsigned long const q = std::stoul(text, &used);
    if (used == text.size() && exact::is_prime(q)) return prime(q);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "unknown place '" + text + "'");
}

std::vector<Place> places_of(const exact::PrimeSupport& support) {
  std::vector<Place> out{Place::infinity()};
  for (auto p : support.primes()) out.push_back(Place::prime(p));
  return out;
}

LocalScalar LocalScalar::p_power(unsigned long p, const Rational& exponent) {
  return LocalScalar{Place::prime(p), rational_power(p, exponent), exponent};
}

LocalScalar LocalScalar::p_bound(unsigned long p, const Rational& exponent) {
  return LocalScalar{Place::prime(p), Interval(Rational(0), rational_power(p, exponent).hi()), {}};
}

std::string LocalScalar::to_string() const {
  if (log_p) return place.to_string() + "^" + log_p->get_str();
  return value.to_string();
}

namespace {

void same_place(const LocalScalar& a, const LocalScalar& b) {
  if (a.place != b.place) throw Error(ErrorCode::PreconditionViolated, "local scalars at different places");
}

}  // namespace

LocalScalar operator*(const LocalScalar& a, const LocalScalar& b) {
  same_place(a, b);
  LocalScalar r{a.place, a.value * b.value, {}};
  if (a.log_p && b.log_p) r.log_p = Rational(*a.log_p + *b.log_p);
  return r;
}

LocalScalar operator/(const LocalScalar& a, const LocalScalar& b) {
  same_place(a, b);
  LocalScalar r{a.place, a.value / b.value, {}};
  if (a.log_p && b.log_p) r.log_p = Rational(*a.log_p - *b.log_p);
  return r;
}

LocalScalar max(const LocalScalar& a, const LocalScalar& b) {
  same_place(a, b);
  if (a.log_p && b.log_p) return *a.log_p >= *b.log_p ? a : b;
  if (a.value.lo() >= b.value.hi()) return a;
  if (b.value.lo() >= a.value.hi()) return b;
  return LocalScalar{a.place, max(a.value, b.value), {}};
}

LocalScalar min(const LocalScalar& a, const LocalScalar& b) {
  same_place(a, b);
  if (a.log_p && b.log_p) return *a.log_p <= *b.log_p ? a : b;
  if (a.value.hi() <= b.value.lo()) return a;
  if (b.value.hi() <= a.value.lo()) return b;
  return LocalScalar{a.place, min(a.value, b.value), {}};
}

LocalScalar sqrt(const LocalScalar& a) {
  LocalScalar r{a.place, sqrt(a.value), {}};
  if (a.log_p) {
    r.log_p = Rational(*a.log_p / 2);
    r.value = rational_power(a.place.p, *r.log_p);
  }
  return r;
}

LocalScalar pow(const LocalScalar& a, unsigned long e) {
  LocalScalar r{a.place, pow(a.value, e), {}};
  if (a.log_p) r.log_p = Rational(*a.log_p * static_cast<long>(e));
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Gt: return ">";
    case Relation::Ge: return ">=";
  }
  return "?";
}

Relation parse_relation(std::string_view text) {
  if (text == "<") return Relation::Lt;
  if (text == "<=") return Relation::Le;
  if (text == ">") return Relation::Gt;
  if (text == ">=") return Relation::Ge;
  throw Error(ErrorCode::ParseError, "unknown relation '" + std::string(text) + "'");
}

Verdict compare(const Interval& x, const Interval& y, Relation rel) {
  switch (rel) {
    case Relation::Lt:
      if (x.hi() < y.lo()) return Verdict::True;
      if (x.lo() >= y.hi()) return Verdict::False;
      return Verdict::Undecided;
    case Relation::Le:
      if (x.hi() <= y.lo()) return Verdict::True;
      if (x.lo() > y.hi()) return Verdict::False;
      return Verdict::Undecided;
    case Relation::Gt: return compare(y, x, Relation::Lt);
    case Relation::Ge: return compare(y, x, Relation::Le);
  }
  return Verdict::Undecided;
}

Verdict compare(const LocalScalar& x, const LocalScalar& y, Relation rel) {
  same_place(x, y);
  if (x.log_p && y.log_p) {
    Rational const& a = *x.log_p;
    Rational const& b = *y.log_p;
    bool r = false;
    switch (rel) {
      case Relation::Lt: r = a < b; break;
      case Relation::Le: r = a <= b; break;
      case Relation::Gt: r = a > b; break;
      case Relation::Ge: r = a >= b; break;
    }
    return r ? Verdict::True : Verdict::False;
  }
  return compare(x.value, y.value, rel);
}

LocalScalar abs_at(const Rational& x, Place v) {
  if (v.is_infinite()) return LocalScalar::at_infinity(Interval(exact::abs(x)));
  if (x == 0) return LocalScalar::zero(v);
  return LocalScalar::p_power(v.p, Rational(-exact::valuation(x, v.p)));
}

}  // namespace pingpong::places
