#include "pingpong/projgeom/projective.hpp"

#include <algorithm>

#include "pingpong/error.hpp"
#include "pingpong/places/norms.hpp"

namespace pingpong::projgeom {

using places::Relation;
using places::Verdict;

LocalVector LocalVector::from_rational(const QVector& v, Place place) {
  LocalVector out{place, {}, {}};
  for (auto const& x : v) {
    if (place.is_infinite()) {
      out.real.emplace_back(x);
    } else {
      out.padic.emplace_back(place.p, x);
    }
  }
  return out;
}

std::optional<QVector> LocalVector::exact() const {
  QVector out;
  if (place.is_infinite()) {
    for (auto const& x : real) {
      if (!x.is_point()) return std::nullopt;
      out.push_back(x.lo());
    }
  } else {
    for (auto const& x : padic) {
      if (!x.is_exact()) return std::nullopt;
      out.push_back(x.center());
    }
  }
  return out;
}

QVector LocalVector::centers() const {
  QVector out;
  if (place.is_infinite()) {
    for (auto const& x : real) out.push_back(x.mid());
  } else {
    for (auto const& x : padic) out.push_back(x.center());
  }
  return out;
}

namespace {

LocalScalar padic_abs(const PAdic& x) {
  Place const v = Place::prime(x.prime());
  if (auto val = x.valuation()) return LocalScalar::p_power(x.prime(), Rational(-*val));
  if (x.is_exact()) return LocalScalar::zero(v);
  return LocalScalar::p_bound(x.prime(), Rational(-*x.precision()));
}

LocalScalar max_all(const std::vector<LocalScalar>& xs, Place v) {
  if (xs.empty()) return LocalScalar::zero(v);
  LocalScalar m = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) m = places::max(m, xs[i]);
  return m;
}

Interval sum_sq(const std::vector<Interval>& xs) {
  Interval s(0L);
  for (auto const& x : xs) s += places::sqr(x);
  return s;
}

void check_same(Place a, Place b, std::size_t n, std::size_t m) {
  if (a != b) throw Error(ErrorCode::PreconditionViolated, "projective data at different places");
  if (n != m) throw Error(ErrorCode::PreconditionViolated, "projective data of different dimensions");
}

Interval positive_quotient(const Interval& num, const Interval& den) {
  if (!den.positive()) throw Error(ErrorCode::PrecisionExhausted, "norm not certified nonzero");
  Interval q = num / den;
  if (q.lo() < 0) q = Interval(Rational(0), std::max(Rational(0), q.hi()));
  return q;
}

}  // namespace

LocalScalar abs_entry(const LocalVector& v, std::size_t i) {
  if (v.place.is_infinite()) return LocalScalar::at_infinity(places::abs(v.real[i]));
  return padic_abs(v.padic[i]);
}

LocalScalar norm(const LocalVector& v) {
  if (v.place.is_infinite()) return LocalScalar::at_infinity(places::sqrt(sum_sq(v.real)));
  std::vector<LocalScalar> xs;
  for (auto const& x : v.padic) xs.push_back(padic_abs(x));
  return max_all(xs, v.place);
}

namespace {

QVector normalized(const QVector& v, Place place) {
  QVector out = v;
  if (place.is_infinite()) {
    Rational m(0);
    for (auto const& x : v) m = std::max(m, exact::abs(x));
    if (m == 0) throw Error(ErrorCode::PreconditionViolated, "zero vector is not a projective point");
    for (auto& x : out) x /= m;
  } else {
    long mv = exact::kInfiniteValuation;
    for (auto const& x : v) mv = std::min(mv, exact::valuation(x, place.p));
    if (mv == exact::kInfiniteValuation) {
      throw Error(ErrorCode::PreconditionViolated, "zero vector is not a projective point");
    }
    Rational const s = exact::power(Rational(static_cast<long>(place.p)), -mv);
    for (auto& x : out) x *= s;
  }
  return out;
}

}  // namespace

ProjPoint ProjPoint::from_rational(const QVector& v, Place place) {
  return ProjPoint{LocalVector::from_rational(normalized(v, place), place)};
}

ProjPoint ProjPoint::from_local(LocalVector v) { return ProjPoint{std::move(v)}; }

ProjHyperplane ProjHyperplane::from_rational(const QVector& f, Place place) {
  return ProjHyperplane{LocalVector::from_rational(normalized(f, place), place)};
}

ProjHyperplane ProjHyperplane::from_local(LocalVector f) { return ProjHyperplane{std::move(f)}; }

Interval proj_dist_sq(const ProjPoint& x, const ProjPoint& y) {
  check_same(x.place(), y.place(), x.dim(), y.dim());
  if (!x.place().is_infinite()) throw Error(ErrorCode::PreconditionViolated, "squared distance is archimedean");
  auto const& v = x.rep.real;
  auto const& w = y.rep.real;
  Interval num(0L);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) num += places::sqr(v[i] * w[j] - v[j] * w[i]);
  }
  return positive_quotient(num, sum_sq(v) * sum_sq(w));
}

LocalScalar proj_dist(const ProjPoint& x, const ProjPoint& y) {
  check_same(x.place(), y.place(), x.dim(), y.dim());
  if (x.place().is_infinite()) return LocalScalar::at_infinity(places::sqrt(proj_dist_sq(x, y)));
  auto const& v = x.rep.padic;
  auto const& w = y.rep.padic;
  std::vector<LocalScalar> minors;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) minors.push_back(padic_abs(v[i] * w[j] - v[j] * w[i]));
  }
  return max_all(minors, x.place()) / (norm(x.rep) * norm(y.rep));
}

Interval dist_to_hyperplane_sq(const ProjPoint& x, const ProjHyperplane& h) {
  check_same(x.place(), h.place(), x.dim(), h.dim());
  if (!x.place().is_infinite()) throw Error(ErrorCode::PreconditionViolated, "squared distance is archimedean");
  Interval f(0L);
  for (std::size_t i = 0; i < x.dim(); ++i) f += h.form.real[i] * x.rep.real[i];
  return positive_quotient(places::sqr(f), sum_sq(h.form.real) * sum_sq(x.rep.real));
}

LocalScalar dist_to_hyperplane(const ProjPoint& x, const ProjHyperplane& h) {
  check_same(x.place(), h.place(), x.dim(), h.dim());
  if (x.place().is_infinite()) {
    return LocalScalar::at_infinity(places::sqrt(dist_to_hyperplane_sq(x, h)));
  }
  PAdic f(x.place().p, Rational(0));
  for (std::size_t i = 0; i < x.dim(); ++i) f += h.form.padic[i] * x.rep.padic[i];
  return padic_abs(f) / (norm(h.form) * norm(x.rep));
}

LocalScalar form_distance(const ProjHyperplane& a, const ProjHyperplane& b) {
  check_same(a.place(), b.place(), a.dim(), b.dim());
  std::size_t const n = a.dim();
  if (a.place().is_infinite()) {
    Interval const na = places::sqrt(sum_sq(a.form.real));
    Interval const nb = places::sqrt(sum_sq(b.form.real));
    Interval best;
    bool first = true;
    for (int s : {1, -1}) {
      Interval acc(0L);
      for (std::size_t i = 0; i < n; ++i) {
        acc += places::sqr(a.form.real[i] / na - Interval(static_cast<long>(s)) * b.form.real[i] / nb);
      }
      Interval const d = places::sqrt(acc);
      best = first ? d : places::min(best, d);
      first = false;
    }
    return LocalScalar::at_infinity(best);
  }
  // Scale both forms to max-norm 1 through a coordinate where a is a unit
  // multiple of its norm, and match b there.
  LocalScalar const na = norm(a.form);
  std::size_t pivot = n;
  for (std::size_t i = 0; i < n && pivot == n; ++i) {
    auto const ai = padic_abs(a.form.padic[i]);
    if (ai.log_p && na.log_p && *ai.log_p == *na.log_p) pivot = i;
  }
  if (pivot == n || b.form.padic[pivot].may_be_zero()) {
    return LocalScalar::p_power(a.place().p, Rational(0));
  }
  PAdic const c = a.form.padic[pivot] / b.form.padic[pivot];
  std::vector<LocalScalar> diffs;
  for (std::size_t i = 0; i < n; ++i) diffs.push_back(padic_abs(a.form.padic[i] - c * b.form.padic[i]));
  LocalScalar d = max_all(diffs, a.place()) / na;
  // Distances between normalised forms never exceed 1.
  if (places::compare(d, LocalScalar::p_power(a.place().p, Rational(0)), Relation::Gt) == Verdict::True) {
    return LocalScalar::p_power(a.place().p, Rational(0));
  }
  return d;
}

ProjPoint apply(const QMatrix& g, const ProjPoint& x) {
  LocalVector out{x.place(), {}, {}};
  std::size_t const n = x.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (x.place().is_infinite()) {
      Interval acc(0L);
      for (std::size_t j = 0; j < n; ++j) {
        if (g(i, j) != 0) acc += Interval(g(i, j)) * x.rep.real[j];
      }
      out.real.push_back(acc);
    } else {
      PAdic acc(x.place().p, Rational(0));
      for (std::size_t j = 0; j < n; ++j) {
        if (g(i, j) != 0) acc += PAdic(x.place().p, g(i, j)) * x.rep.padic[j];
      }
      out.padic.push_back(acc);
    }
  }
  if (auto e = out.exact()) return ProjPoint::from_rational(*e, x.place());
  return ProjPoint::from_local(std::move(out));
}

ProjHyperplane apply(const QMatrix& g_inverse, const ProjHyperplane& h) {
  // f' = f o g^-1, i.e. f'_j = sum_i f_i (g^-1)_{ij}.
  LocalVector out{h.place(), {}, {}};
  std::size_t const n = h.dim();
  for (std::size_t j = 0; j < n; ++j) {
    if (h.place().is_infinite()) {
      Interval acc(0L);
      for (std::size_t i = 0; i < n; ++i) {
        if (g_inverse(i, j) != 0) acc += h.form.real[i] * Interval(g_inverse(i, j));
      }
      out.real.push_back(acc);
    } else {
      PAdic acc(h.place().p, Rational(0));
      for (std::size_t i = 0; i < n; ++i) {
        if (g_inverse(i, j) != 0) acc += h.form.padic[i] * PAdic(h.place().p, g_inverse(i, j));
      }
      out.padic.push_back(acc);
    }
  }
  if (auto e = out.exact()) return ProjHyperplane::from_rational(*e, h.place());
  return ProjHyperplane::from_local(std::move(out));
}

QVector rational_approximation(const LocalVector& v, unsigned long bits) {
  QVector c = v.centers();
  if (!v.place.is_infinite()) return c;
  Rational m(0);
  for (auto const& x : c) m = std::max(m, exact::abs(x));
  if (m == 0) throw Error(ErrorCode::PrecisionExhausted, "vector enclosure contains zero");
  Rational const scale = places::two_pow(static_cast<long>(bits));
  for (auto& x : c) {
    Rational const y = x / m * scale;
    exact::Integer r;
    mpz_fdiv_q(r.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    x = Rational(r) / scale;
  }
  return c;
}

}  // namespace pingpong::projgeom
