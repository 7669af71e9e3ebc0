#include "pingpong/places/roots.hpp"

#include <algorithm>

#include "pingpong/error.hpp"
#include "pingpong/places/place.hpp"

namespace pingpong::places {

using exact::Integer;

SturmSequence::SturmSequence(const QPoly& squarefree) {
  seq_.push_back(squarefree);
  if (squarefree.degree() <= 0) return;
  seq_.push_back(squarefree.derivative());
  while (seq_.back().degree() > 0) {
    QPoly r = -(seq_[seq_.size() - 2] % seq_.back());
    if (r.is_zero()) break;
    // Positive rescaling keeps signs and tames coefficient growth.
    Rational scale(0);
    for (auto const& c : r.coefficients()) scale = std::max(scale, exact::abs(c));
    seq_.push_back(r * Rational(1 / scale));
  }
}

int SturmSequence::variations(const Rational& x) const {
  int v = 0;
  int last = 0;
  for (auto const& f : seq_) {
    int const s = sgn(f(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

Rational cauchy_bound(const QPoly& p) {
  Rational m(0);
  if (p.degree() <= 0) return Rational(1);
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, exact::abs(p.coefficient(i) / p.leading()));
  Rational b = m + 1;
  // Round up to a power of two for cheap dyadic bisection.
  Rational t(1);
  while (t < b) t *= 2;
  return t;
}

Rational simplest_rational(const Rational& a, const Rational& b) {
  // Continued-fraction descent on [a, b] with a <= b.
  if (a > b) return simplest_rational(b, a);
  if (a <= 0 && b >= 0) return Rational(0);
  if (b < 0) return -simplest_rational(-b, -a);
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  if (Rational(fl) == a) return a;
  if (Rational(fl + 1) <= b) return Rational(fl + 1);
  // Both in (fl, fl+1): recurse on reciprocals of the fractional parts.
  Rational const fa = a - fl;
  Rational const fb = b - fl;
  Rational const inner = simplest_rational(1 / fb, 1 / fa);
  return Rational(fl) + 1 / inner;
}

Interval refine_root(const SturmSequence& s, Rational a, Rational b, const Rational& width) {
  QPoly const& f = s.poly();
  if (f(b) == 0) return Interval(b);
  int va = s.variations(a);
  while (b - a > width) {
    Rational const m = (a + b) / 2;
    if (f(m) == 0) return Interval(m);
    int const vm = s.variations(m);
    if (va - vm >= 1) {
      b = m;
    } else {
      a = m;
      va = vm;
    }
    // Opportunistic exact detection of simple rationals.
    Rational const q = simplest_rational(a, b);
    if (q > a && f(q) == 0) return Interval(q);
  }
  return Interval(a, b);
}

namespace {

void isolate(const SturmSequence& s, const Rational& a, const Rational& b, int count,
             const Rational& width, std::vector<Interval>& out) {
  if (count == 0) return;
  if (count == 1) {
    out.push_back(refine_root(s, a, b, width));
    return;
  }
  Rational const m = (a + b) / 2;
  if (s.poly()(m) == 0) {
    // Cut a small root-free window around the exact root m.
    Rational delta = (b - a) / 4;
    while (s.count(m - delta, m + delta) != 1) delta /= 2;
    out.push_back(Interval(m));
    Rational const l = m - delta;
    Rational const r = m + delta;
    isolate(s, a, l, s.count(a, l), width, out);
    isolate(s, r, b, s.count(r, b), width, out);
    return;
  }
  int const left = s.count(a, m);
  isolate(s, a, m, left, width, out);
  isolate(s, m, b, count - left, width, out);
}

}  // namespace

std::vector<RealRoot> real_roots(const QPoly& p, const Rational& width) {
  std::vector<RealRoot> roots;
  if (p.degree() <= 0) return roots;
  auto const parts = exact::squarefree_decomposition(p);
  QPoly sf = exact::squarefree_part(p);
  SturmSequence const s(sf);
  Rational const bound = cauchy_bound(sf);
  std::vector<Interval> found;
  isolate(s, -bound, bound, s.count(-bound, bound), width, found);
  std::sort(found.begin(), found.end(),
            [](const Interval& x, const Interval& y) { return x.lo() < y.lo(); });
  std::vector<SturmSequence> factor_seqs;
  for (auto const& f : parts) factor_seqs.emplace_back(f);
  for (auto const& iv : found) {
    int mult = 1;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].degree() <= 0) continue;
      bool hit = false;
      if (iv.is_point()) {
        hit = parts[k](iv.lo()) == 0;
      } else {
        hit = factor_seqs[k].count(iv.lo(), iv.hi()) > 0;
      }
      if (hit) {
        mult = static_cast<int>(k) + 1;
        break;
      }
    }
    roots.push_back(RealRoot{iv, mult});
  }
  return roots;
}

namespace {

// Distinct roots of the squarefree s in [lo, hi].
int closed_count(const SturmSequence& s, const Rational& lo, const Rational& hi) {
  return s.count(lo, hi) + (s.poly()(lo) == 0 ? 1 : 0);
}

}  // namespace

bool roots_coincide(const QPoly& f, const Interval& a, const QPoly& g, const Interval& b) {
  if (f.degree() <= 0 || g.degree() <= 0) return false;
  Rational const lo = std::max(a.lo(), b.lo());
  Rational const hi = std::min(a.hi(), b.hi());
  if (lo > hi) return false;
  QPoly const fs = exact::squarefree_part(f);
  QPoly const gs = exact::squarefree_part(g);
  if (closed_count(SturmSequence(fs), a.lo(), a.hi()) != 1) return false;
  if (closed_count(SturmSequence(gs), b.lo(), b.hi()) != 1) return false;
  QPoly const h = exact::gcd(fs, gs);
  if (h.degree() <= 0) return false;
  return closed_count(SturmSequence(h), lo, hi) >= 1;
}

std::optional<int> count_in_disk(const QPoly& p, const Rational& radius) {
  int zeros = p.trailing_zeros();
  QPoly const q = p.shift_down(zeros).scale_argument(radius);
  std::vector<Interval> c;
  for (auto const& x : q.coefficients()) c.emplace_back(x);
  int total = zeros;
  // Roots of p inside the circle = total + offset + sign * count(c).
  int sign = 1;
  int offset = 0;
  while (c.size() > 1) {
    int const n = static_cast<int>(c.size()) - 1;
    Interval const a0 = c.front();
    Interval const an = c.back();
    Verdict const v = compare(abs(a0), abs(an), Relation::Lt);
    if (v != Verdict::True && compare(abs(a0), abs(an), Relation::Gt) != Verdict::True) {
      return std::nullopt;
    }
    // q' = (an q - a0 q*) / z, degree n - 1.
    std::vector<Interval> next(static_cast<std::size_t>(n));
    Rational scale(0);
    for (int k = 1; k <= n; ++k) {
      next[static_cast<std::size_t>(k - 1)] =
          an * c[static_cast<std::size_t>(k)] - a0 * c[static_cast<std::size_t>(n - k)];
    }
    for (auto const& x : next) scale = std::max({scale, exact::abs(x.lo()), exact::abs(x.hi())});
    if (scale == 0) return std::nullopt;
    Rational const inv = round_up(Rational(1 / scale), 32);
    for (auto& x : next) x *= Interval(inv);
    if (v == Verdict::True) {
      // count(q) = 1 + count(q')
      offset += sign;
    } else {
      // count(q) = n - 1 - count(q')
      offset += sign * (n - 1);
      sign = -sign;
    }
    c = std::move(next);
    if (c.back().contains_zero()) return std::nullopt;
  }
  return total + offset;
}

namespace {

// Counts roots inside |z| < r, nudging r inside (lo, hi) when the circle is
// too close to a root, then raising precision.
std::optional<int> robust_count(const QPoly& p, Rational& r, const Rational& lo, const Rational& hi) {
  Rational const base = r;
  Rational const step = (hi - lo) / 64;
  for (int attempt = 0; attempt < 12; ++attempt) {
    long const k = (attempt / 2 + 1) * (attempt % 2 == 0 ? 1 : -1);
    auto n = count_in_disk(p, r);
    if (n) return n;
    r = base + step * k;
  }
  r = base;
  for (unsigned long bits = working_precision() * 2; bits <= 4096; bits *= 2) {
    PrecisionScope scope(bits);
    auto n = count_in_disk(p, r);
    if (n) return n;
  }
  return std::nullopt;
}

void clusters(const QPoly& p, const Rational& lo, const Rational& hi, int nlo, int nhi,
              const Rational& rel, std::vector<ModulusCluster>& out) {
  if (nhi == nlo) return;
  if (hi - lo <= rel * lo) {
    out.push_back(ModulusCluster{Interval(lo, hi), nhi - nlo});
    return;
  }
  Rational m = (lo + hi) / 2;
  auto nm = robust_count(p, m, lo, hi);
  if (!nm) throw Error(ErrorCode::PrecisionExhausted, "root moduli could not be separated");
  clusters(p, m, hi, *nm, nhi, rel, out);
  clusters(p, lo, m, nlo, *nm, rel, out);
}

}  // namespace

std::vector<ModulusCluster> root_moduli(const QPoly& p, unsigned long bits) {
  std::vector<ModulusCluster> out;
  if (p.degree() <= 0) return out;
  int const zeros = p.trailing_zeros();
  QPoly const q = p.shift_down(zeros);
  if (q.degree() > 0) {
    Rational hi = cauchy_bound(q);
    Rational lo = 1 / cauchy_bound(q.reversed());
    lo /= 2;
    auto nhi = robust_count(q, hi, hi, hi * 2);
    auto nlo = robust_count(q, lo, lo / 2, lo);
    if (!nhi || !nlo || *nhi != q.degree() || *nlo != 0) {
      throw Error(ErrorCode::PrecisionExhausted, "root modulus bounds not certified");
    }
    Rational const rel = Rational(1) / Rational(Integer(1) << bits);
    clusters(q, lo, hi, 0, q.degree(), rel, out);
  }
  if (zeros > 0) out.push_back(ModulusCluster{Interval(0L), zeros});
  return out;
}

NewtonPolygon newton_polygon(const QPoly& poly, unsigned long p) {
  NewtonPolygon np;
  np.zero_roots = poly.trailing_zeros();
  std::vector<std::pair<long, long>> pts;  // (i, v(c_i))
  for (int i = np.zero_roots; i <= poly.degree(); ++i) {
    Rational const c = poly.coefficient(i);
    if (c != 0) pts.emplace_back(i, exact::valuation(c, p));
  }
  // Lower convex hull from left to right.
  std::vector<std::pair<long, long>> hull;
  for (auto const& pt : pts) {
    while (hull.size() >= 2) {
      auto const& a = hull[hull.size() - 2];
      auto const& b = hull.back();
      // Remove b when it lies on or above segment a -> pt.
      Integer const lhs = Integer(b.second - a.second) * Integer(pt.first - a.first);
      Integer const rhs = Integer(pt.second - a.second) * Integer(b.first - a.first);
      if (lhs >= rhs) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  // Segment slope s: roots of valuation -s, absolute value p^{s}.
  for (std::size_t k = 1; k < hull.size(); ++k) {
    long const dx = hull[k].first - hull[k - 1].first;
    Rational slope(hull[k].second - hull[k - 1].second, dx);
    slope.canonicalize();
    np.segments.push_back(NewtonSegment{slope, static_cast<int>(dx)});
  }
  std::sort(np.segments.begin(), np.segments.end(),
            [](const NewtonSegment& a, const NewtonSegment& b) { return a.exponent > b.exponent; });
  return np;
}

}  // namespace pingpong::places
