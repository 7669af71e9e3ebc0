#include "pingpong/places/norms.hpp"

#include <algorithm>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/roots.hpp"

namespace pingpong::places {

Rational two_pow(long e) {
  Rational r(1);
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

std::vector<Interval> singular_values(const QMatrix& a) {
  QMatrix const ata = a.transpose() * a;
  exact::QPoly const chi = exact::char_poly(ata);
  long const bits = static_cast<long>(working_precision());
  Rational const width = two_pow(-bits) * cauchy_bound(chi);
  auto roots = real_roots(chi, width);
  std::vector<Interval> out;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    Interval r = it->enclosure;
    if (r.lo() < 0) r = Interval(Rational(0), std::max(Rational(0), r.hi()));
    Interval const s = sqrt(r);
    for (int k = 0; k < it->multiplicity; ++k) out.push_back(s);
  }
  return out;
}

LocalScalar op_norm(const QMatrix& a, Place v) {
  if (v.is_infinite()) {
    auto const s = singular_values(a);
    return LocalScalar::at_infinity(s.empty() ? Interval(0L) : s.front());
  }
  LocalScalar best = LocalScalar::zero(v);
  bool any = false;
  for (auto const& x : a.data()) {
    if (x == 0) continue;
    LocalScalar const ax = abs_at(x, v);
    best = any ? max(best, ax) : ax;
    any = true;
  }
  return best;
}

std::vector<LocalScalar> eigen_moduli(const QMatrix& a, Place v) {
  exact::QPoly const chi = exact::char_poly(a);
  std::vector<LocalScalar> out;
  if (v.is_infinite()) {
    // Rational eigenvalues are split off so their moduli stay exact.
    exact::QPoly rest = chi;
    for (auto const& r : real_roots(chi, two_pow(-8))) {
      if (!r.enclosure.is_point()) continue;
      Rational const x = r.enclosure.lo();
      for (int k = 0; k < r.multiplicity; ++k) {
        out.push_back(LocalScalar::at_infinity(Interval(exact::abs(x))));
        rest = rest / exact::QPoly::linear(x);
      }
    }
    if (rest.degree() > 0) {
      for (auto const& c : root_moduli(rest, working_precision() / 2)) {
        for (int k = 0; k < c.count; ++k) out.push_back(LocalScalar::at_infinity(c.modulus));
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const LocalScalar& x, const LocalScalar& y) {
      return x.value.mid() > y.value.mid();
    });
    return out;
  }
  auto const np = newton_polygon(chi, v.p);
  for (auto const& s : np.segments) {
    for (int k = 0; k < s.multiplicity; ++k) out.push_back(LocalScalar::p_power(v.p, s.exponent));
  }
  for (int k = 0; k < np.zero_roots; ++k) out.push_back(LocalScalar::zero(v));
  return out;
}

LocalScalar max_eig_abs(const QMatrix& a, Place v) {
  auto const m = eigen_moduli(a, v);
  if (m.empty()) return LocalScalar::zero(v);
  return m.front();
}

GlobalLambda lambda_global(const QMatrix& a, const exact::PrimeSupport& support) {
  GlobalLambda g{Interval(0L), Place::infinity(), {}};
  bool first = true;
  for (Place const v : places_of(support)) {
    LocalScalar const l = max_eig_abs(a, v);
    g.per_place.push_back(l);
    if (first) {
      g.value = l.value;
      g.place = v;
      first = false;
      continue;
    }
    Verdict const gt = compare(l.value, g.value, Relation::Gt);
    if (gt == Verdict::True) {
      g.value = l.value;
      g.place = v;
    } else if (gt == Verdict::Undecided) {
      // Overlapping enclosures: keep the earlier place, widen the value.
      g.value = max(g.value, l.value);
    }
  }
  return g;
}

}  // namespace pingpong::places
