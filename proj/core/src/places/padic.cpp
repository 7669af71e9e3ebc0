#include "pingpong/places/padic.hpp"

#include <algorithm>

#include "pingpong/error.hpp"

namespace pingpong::places {

using exact::Integer;
using exact::kInfiniteValuation;
using exact::valuation;

Rational truncate_padic(const Rational& x, unsigned long p, long n) {
  if (x == 0) return x;
  long const v = valuation(x, p);
  if (v >= n) return Rational(0);
  Rational const u = exact::unit_part(x, p);
  Integer const modulus = exact::power(Integer(p), static_cast<unsigned long>(n - v));
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), u.get_den_mpz_t(), modulus.get_mpz_t()) == 0) {
    throw Error(ErrorCode::PreconditionViolated, "unit part not invertible mod p^k");
  }
  Integer r = Integer(u.get_num() * inv) % modulus;
  if (r < 0) r += modulus;
  return exact::power(Rational(static_cast<long>(p)), v) * Rational(r);
}

PAdic::PAdic(unsigned long p, const Rational& center, long precision)
    : p_(p), center_(center), prec_(precision) {
  normalize();
}

void PAdic::normalize() {
  if (prec_) center_ = truncate_padic(center_, p_, *prec_);
}

void PAdic::set_precision(long n) {
  if (!prec_ || n < *prec_) prec_ = n;
  normalize();
}

std::optional<long> PAdic::valuation() const {
  long const v = exact::valuation(center_, p_);
  if (prec_ && v >= *prec_) return std::nullopt;
  if (v == kInfiniteValuation) return std::nullopt;
  return v;
}

long PAdic::valuation_lower_bound() const {
  long const v = exact::valuation(center_, p_);
  if (prec_) return std::min(v, *prec_);
  return v;
}

PAdic& PAdic::operator+=(const PAdic& o) {
  center_ += o.center_;
  if (o.prec_) set_precision(*o.prec_);
  else normalize();
  return *this;
}

PAdic& PAdic::operator-=(const PAdic& o) {
  center_ -= o.center_;
  if (o.prec_) set_precision(*o.prec_);
  else normalize();
  return *this;
}

PAdic& PAdic::operator*=(const PAdic& o) {
  long const va = valuation_lower_bound();
  long const vb = o.valuation_lower_bound();
  std::optional<long> n;
  auto add = [](long a, long b) {
    if (a == kInfiniteValuation || b == kInfiniteValuation) return kInfiniteValuation;
    return a + b;
  };
  if (prec_) n = add(*prec_, vb);
  if (o.prec_) {
    long const m = add(*o.prec_, va);
    n = n ? std::min(*n, m) : m;
  }
  center_ *= o.center_;
  prec_.reset();
  if (n && *n != kInfiniteValuation) set_precision(*n);
  return *this;
}

PAdic& PAdic::operator/=(const PAdic& o) {
  auto const vb = o.valuation();
  if (!vb) throw Error(ErrorCode::PrecisionExhausted, "p-adic division by a ball containing zero");
  long const va = valuation_lower_bound();
  std::optional<long> n;
  if (prec_) n = *prec_ - *vb;
  if (o.prec_) {
    long const m = (va == kInfiniteValuation ? kInfiniteValuation : *o.prec_ - 2 * *vb + va);
    n = n ? std::min(*n, m) : m;
  }
  center_ /= o.center_;
  prec_.reset();
  if (n && *n != kInfiniteValuation) set_precision(*n);
  return *this;
}

std::string PAdic::to_string() const {
  std::string s = center_.get_str();
  if (prec_) s += " + O(" + std::to_string(p_) + "^" + std::to_string(*prec_) + ")";
  return s;
}

}  // namespace pingpong::places
