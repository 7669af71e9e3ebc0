#include "pingpong/projgeom/cartan.hpp"

#include <algorithm>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/norms.hpp"
#include "pingpong/places/roots.hpp"

namespace pingpong::projgeom {

using places::PrecisionScope;
using places::Relation;
using places::Verdict;

LocalScalar CartanData::ratio() const {
  if (a.size() < 2) return LocalScalar::zero(place);
  return a[1] / a[0];
}

SmithForm smith_form(const QMatrix& a, unsigned long p) {
  std::size_t const d = a.rows();
  QMatrix m = a;
  QMatrix left = QMatrix::identity(d);
  QMatrix right = QMatrix::identity(d);
  SmithForm out;
  std::vector<Rational> units;
  for (std::size_t t = 0; t < d; ++t) {
    std::size_t bi = d, bj = d;
    long bv = exact::kInfiniteValuation;
    for (std::size_t i = t; i < d; ++i) {
      for (std::size_t j = t; j < d; ++j) {
        if (m(i, j) == 0) continue;
        long const v = exact::valuation(m(i, j), p);
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == d) throw Error(ErrorCode::PreconditionViolated, "Smith form of a singular matrix");
    for (std::size_t c = 0; c < d; ++c) {
      std::swap(m(t, c), m(bi, c));
      std::swap(left(t, c), left(bi, c));
    }
    for (std::size_t r = 0; r < d; ++r) {
      std::swap(m(r, t), m(r, bj));
      std::swap(right(r, t), right(r, bj));
    }
    Rational const piv = m(t, t);
    for (std::size_t i = t + 1; i < d; ++i) {
      if (m(i, t) == 0) continue;
      Rational const f = m(i, t) / piv;
      for (std::size_t c = 0; c < d; ++c) {
        m(i, c) -= f * m(t, c);
        left(i, c) -= f * left(t, c);
      }
    }
    for (std::size_t j = t + 1; j < d; ++j) {
      if (m(t, j) == 0) continue;
      Rational const f = m(t, j) / piv;
      for (std::size_t r = 0; r < d; ++r) {
        m(r, j) -= f * m(r, t);
        right(r, j) -= f * right(r, t);
      }
    }
    out.exponents.push_back(bv);
    units.push_back(exact::unit_part(piv, p));
  }
  // m = left a right is diagonal, so a = left^-1 m right^-1.
  out.k = exact::inverse(left) * QMatrix::diagonal(units);
  out.k_prime = exact::inverse(right);
  return out;
}

namespace {

std::vector<Interval> squared_singular_values(const QMatrix& a) {
  QMatrix const ata = a.transpose() * a;
  exact::QPoly const chi = exact::char_poly(ata);
  long const bits = static_cast<long>(places::working_precision());
  Rational const width = places::two_pow(-bits) * places::cauchy_bound(chi);
  auto const roots = places::real_roots(chi, width);
  std::vector<Interval> out;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    Interval r = it->enclosure;
    if (r.lo() < 0) r = Interval(Rational(0), std::max(Rational(0), r.hi()));
    for (int k = 0; k < it->multiplicity; ++k) out.push_back(r);
  }
  return out;
}

// Column of adj(mu I - M) with the largest diagonal entry, evaluated over the
// interval mu.  Encloses a top eigenvector of the symmetric matrix M.
std::optional<std::vector<Interval>> top_eigenvector(const QMatrix& m, const Interval& mu) {
  auto const coeffs = exact::adjugate_polynomial(m);
  std::size_t const n = m.rows();
  std::vector<Interval> adj(n * n, Interval(0L));
  Interval mu_k(1L);
  for (auto const& c : coeffs) {
    for (std::size_t e = 0; e < n * n; ++e) {
      if (c.data()[e] != 0) adj[e] += Interval(c.data()[e]) * mu_k;
    }
    mu_k *= mu;
  }
  std::size_t col = 0;
  Rational best(-1);
  for (std::size_t j = 0; j < n; ++j) {
    Rational const v = exact::abs(adj[j * n + j].mid());
    if (v > best) {
      best = v;
      col = j;
    }
  }
  std::vector<Interval> vec;
  bool nonzero = false;
  for (std::size_t i = 0; i < n; ++i) {
    vec.push_back(adj[i * n + col]);
    if (!vec.back().contains_zero()) nonzero = true;
  }
  if (!nonzero) return std::nullopt;
  return vec;
}

CartanData cartan_infinity(const QMatrix& a, bool directions) {
  CartanData c{Place::infinity(), {}, {}, {}};
  std::size_t const d = a.rows();
  for (unsigned long bits = places::working_precision(); bits <= 4096; bits *= 2) {
    PrecisionScope scope(bits);
    auto const sq = squared_singular_values(a);
    c.a.clear();
    for (auto const& s : sq) c.a.push_back(LocalScalar::at_infinity(places::sqrt(s)));
    if (!directions || d < 2) return c;
    if (places::compare(sq[0], sq[1], Relation::Gt) != Verdict::True) {
      // a_1 = a_2 (or not yet separated): directions are not unique.
      if (places::compare(sq[0], sq[1], Relation::Le) == Verdict::True) return c;
      continue;
    }
    auto const right = top_eigenvector(a.transpose() * a, sq[0]);
    if (!right) continue;
    LocalVector form{Place::infinity(), *right, {}};
    ProjHyperplane const h = ProjHyperplane::from_local(form);
    ProjPoint const v = apply(a, ProjPoint::from_local(form));
    bool ok = false;
    for (auto const& x : v.rep.real) ok = ok || !x.contains_zero();
    if (!ok) continue;
    c.attracting = v;
    c.repelling = h;
    return c;
  }
  throw Error(ErrorCode::PrecisionExhausted, "Cartan directions not separated at the precision cap");
}

}  // namespace

CartanData cartan(const QMatrix& a, Place v, bool directions) {
  if (!a.is_square()) throw Error(ErrorCode::PreconditionViolated, "Cartan data of a non-square matrix");
  if (v.is_infinite()) return cartan_infinity(a, directions);
  SmithForm const s = smith_form(a, v.p);
  CartanData c{v, {}, {}, {}};
  for (long j : s.exponents) c.a.push_back(LocalScalar::p_power(v.p, Rational(-j)));
  if (directions) {
    c.attracting = ProjPoint::from_rational(s.k.column(0), v);
    c.repelling = ProjHyperplane::from_rational(s.k_prime.row(0), v);
  }
  return c;
}

LocalScalar lipschitz_bound(const QMatrix& a, Place v) {
  CartanData const c = cartan(a, v, false);
  LocalScalar const r = c.a.front() / c.a.back();
  return r * r;
}

}  // namespace pingpong::projgeom
