#include "pingpong/places/interval.hpp"

#include <mpfr.h>

#include <algorithm>

#include "pingpong/error.hpp"

namespace pingpong::places {

namespace {

thread_local unsigned long g_bits = 128;

// RAII wrapper so every early exit frees the MPFR value.
class Mpfr {
 public:
  explicit Mpfr(unsigned long bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }
  Rational to_rational() {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }

 private:
  mpfr_t v_;
};

std::size_t size_bits(const Rational& x) {
  return mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2);
}

bool perfect_square(const Rational& x, Rational* root) {
  if (x < 0) return false;
  if (!mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t())) {
    return false;
  }
  Integer n, d;
  mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
  *root = Rational(n, d);
  root->canonicalize();
  return true;
}

using UnaryMpfr = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

Rational apply_directed(UnaryMpfr f, const Rational& x, mpfr_rnd_t rnd) {
  Mpfr v(g_bits + 32);
  mpfr_set_q(v.get(), x.get_mpq_t(), rnd);
  f(v.get(), v.get(), rnd);
  return v.to_rational();
}

}  // namespace

unsigned long working_precision() { return g_bits; }

PrecisionScope::PrecisionScope(unsigned long bits) : saved_(g_bits) { g_bits = std::max(bits, 16UL); }
PrecisionScope::~PrecisionScope() { g_bits = saved_; }

Rational round_down(const Rational& x, unsigned long bits) {
  Mpfr v(bits);
  mpfr_set_q(v.get(), x.get_mpq_t(), MPFR_RNDD);
  return v.to_rational();
}

Rational round_up(const Rational& x, unsigned long bits) {
  Mpfr v(bits);
  mpfr_set_q(v.get(), x.get_mpq_t(), MPFR_RNDU);
  return v.to_rational();
}

Interval::Interval(const Rational& lo, const Rational& hi) : lo_(lo), hi_(hi) {
  if (lo_ > hi_) throw Error(ErrorCode::PreconditionViolated, "interval with lo > hi");
  round_outward();
}

Interval Interval::hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

Rational Interval::mid() const {
  Rational m = (lo_ + hi_) / 2;
  return m;
}

void Interval::round_outward() {
  std::size_t const limit = 2 * g_bits + 64;
  if (size_bits(lo_) > limit) lo_ = round_down(lo_, g_bits + 8);
  if (size_bits(hi_) > limit) hi_ = round_up(hi_, g_bits + 8);
}

Interval& Interval::operator+=(const Interval& o) {
  lo_ += o.lo_;
  hi_ += o.hi_;
  round_outward();
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  Rational const lo = lo_ - o.hi_;
  hi_ -= o.lo_;
  lo_ = lo;
  round_outward();
  return *this;
}

Interval& Interval::operator*=(const Interval& o) {
  if (is_point() && o.is_point()) {
    lo_ *= o.lo_;
    hi_ = lo_;
  } else {
    Rational const a = lo_ * o.lo_;
    Rational const b = lo_ * o.hi_;
    Rational const c = hi_ * o.lo_;
    Rational const d = hi_ * o.hi_;
    lo_ = std::min({a, b, c, d});
    hi_ = std::max({a, b, c, d});
  }
  round_outward();
  return *this;
}

Interval& Interval::operator/=(const Interval& o) {
  if (o.contains_zero()) {
    throw Error(ErrorCode::PrecisionExhausted, "division by an interval containing zero");
  }
  Interval inv;
  inv.lo_ = 1 / o.hi_;
  inv.hi_ = 1 / o.lo_;
  return *this *= inv;
}

std::string Interval::to_string() const {
  return "[" + lo_.get_str() + ", " + hi_.get_str() + "]";
}

Interval abs(const Interval& x) {
  if (x.lo() >= 0) return x;
  if (x.hi() <= 0) return -x;
  return Interval(Rational(0), std::max(Rational(-x.lo()), x.hi()));
}

Interval sqr(const Interval& x) {
  Interval a = abs(x);
  return a * a;
}

Interval pow(const Interval& x, unsigned long e) {
  Interval r(1L);
  Interval b = x;
  while (e > 0) {
    if (e & 1UL) r *= b;
    e >>= 1UL;
    if (e > 0) b *= b;
  }
  return r;
}

Interval sqrt(const Interval& x) {
  if (x.hi() < 0) throw Error(ErrorCode::PreconditionViolated, "sqrt of negative interval");
  Rational const lo = x.lo() < 0 ? Rational(0) : x.lo();
  Rational rlo, rhi;
  if (!perfect_square(lo, &rlo)) rlo = apply_directed(mpfr_sqrt, lo, MPFR_RNDD);
  if (!perfect_square(x.hi(), &rhi)) rhi = apply_directed(mpfr_sqrt, x.hi(), MPFR_RNDU);
  return Interval(rlo, rhi);
}

Interval exp(const Interval& x) {
  if (x.is_point() && x.lo() == 0) return Interval(1L);
  return Interval(apply_directed(mpfr_exp, x.lo(), MPFR_RNDD),
                  apply_directed(mpfr_exp, x.hi(), MPFR_RNDU));
}

Interval log(const Interval& x) {
  if (!x.positive()) throw Error(ErrorCode::PrecisionExhausted, "log of interval not certified positive");
  if (x.is_point() && x.lo() == 1) return Interval(0L);
  return Interval(apply_directed(mpfr_log, x.lo(), MPFR_RNDD),
                  apply_directed(mpfr_log, x.hi(), MPFR_RNDU));
}

Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Interval rational_power(unsigned long p, const Rational& e) {
  if (e.get_den() == 1) {
    return Interval(exact::power(Rational(static_cast<long>(p)), e.get_num().get_si()));
  }
  // p^e = exp(e log p), evaluated with directed rounding on both sides.
  Interval const lp = log(Interval(Rational(static_cast<long>(p))));
  return exp(Interval(e) * lp);
}

}  // namespace pingpong::places
