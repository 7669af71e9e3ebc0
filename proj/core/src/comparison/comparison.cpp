#include "pingpong/comparison/comparison.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/exact/word.hpp"
#include "pingpong/parallel.hpp"
#include "pingpong/places/norms.hpp"
#include "pingpong/places/roots.hpp"
#include "pingpong/projgeom/cartan.hpp"

namespace pingpong::comparison {

using places::Relation;
using places::Verdict;

std::vector<QMatrix> power_set(const std::vector<QMatrix>& q, int i, std::size_t cap) {
  if (q.empty()) throw Error(ErrorCode::PreconditionViolated, "empty compact set");
  if (i < 1) throw Error(ErrorCode::PreconditionViolated, "power must be >= 1");
  std::vector<QMatrix> level;
  std::set<std::string> seen;
  for (auto const& a : q) {
    if (seen.insert(exact::canonical_key(a)).second) level.push_back(a);
  }
  for (int k = 1; k < i; ++k) {
    std::vector<QMatrix> next;
    seen.clear();
    for (auto const& p : level) {
      for (auto const& a : q) {
        QMatrix m = p * a;
        if (!seen.insert(exact::canonical_key(m)).second) continue;
        if (next.size() >= cap) throw Error(ErrorCode::BudgetExceeded, "product set exceeds the cap");
        next.push_back(std::move(m));
      }
    }
    level = std::move(next);
  }
  return level;
}

LocalScalar lambda_of_power_set(const CompactSet& q, int i, std::size_t cap) {
  auto const prods = power_set(q.elements, i, cap);
  LocalScalar best = places::max_eig_abs(prods.front(), q.place);
  for (std::size_t k = 1; k < prods.size(); ++k) best = places::max(best, places::max_eig_abs(prods[k], q.place));
  return best;
}

namespace {

LocalScalar set_norm(const std::vector<QMatrix>& q, const QMatrix& g, const QMatrix& g_inv, Place v) {
  std::optional<LocalScalar> best;
  for (auto const& a : q) {
    LocalScalar const n = places::op_norm(g * a * g_inv, v);
    best = best ? places::max(*best, n) : n;
  }
  return *best;
}

// ---- infinity: doubles for the search, exact rationals for the bound.

using DMat = Eigen::MatrixXd;

struct RealSearch {
  std::vector<DMat> q;
  std::size_t d;

  std::size_t params() const { return (d - 1) + d * (d - 1) / 2; }

  DMat conjugator(const std::vector<double>& theta) const {
    DMat g = DMat::Zero(static_cast<long>(d), static_cast<long>(d));
    double sum = 0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      g(static_cast<long>(i), static_cast<long>(i)) = std::exp(theta[i]);
      sum += theta[i];
    }
    g(static_cast<long>(d - 1), static_cast<long>(d - 1)) = std::exp(-sum);
    std::size_t k = d - 1;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) g(static_cast<long>(i), static_cast<long>(j)) = theta[k++];
    }
    return g;
  }

  double objective(const std::vector<double>& theta) const {
    DMat const g = conjugator(theta);
    DMat const gi = g.inverse();
    double best = 0;
    for (auto const& a : q) {
      DMat const m = g * a * gi;
      Eigen::JacobiSVD<DMat> svd(m);
      best = std::max(best, svd.singularValues()(0));
    }
    return std::isfinite(best) ? best : std::numeric_limits<double>::infinity();
  }
};

struct RestartResult {
  std::vector<double> theta;
  double value = std::numeric_limits<double>::infinity();
  long sweeps = 0;
  double step = 1;
};

RestartResult coordinate_descent(const RealSearch& s, std::vector<double> theta, int max_sweeps) {
  RestartResult r;
  double best = s.objective(theta);
  double step = 1;
  long sweeps = 0;
  while (sweeps < max_sweeps && step > 1e-7) {
    bool improved = false;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> trial = theta;
        trial[k] += dir * step;
        double const f = s.objective(trial);
        if (f < best * (1 - 1e-12)) {
          best = f;
          theta = std::move(trial);
          improved = true;
          break;
        }
      }
    }
    ++sweeps;
    if (!improved) step /= 2;
  }
  r.theta = std::move(theta);
  r.value = best;
  r.sweeps = sweeps;
  r.step = step;
  return r;
}

QMatrix to_rational(const DMat& g) {
  QMatrix out(static_cast<std::size_t>(g.rows()), static_cast<std::size_t>(g.cols()));
  for (long i = 0; i < g.rows(); ++i) {
    for (long j = 0; j < g.cols(); ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Rational(g(i, j));
    }
  }
  return out;
}

DMat to_double(const QMatrix& a) {
  DMat m(static_cast<long>(a.rows()), static_cast<long>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<long>(i), static_cast<long>(j)) = a(i, j).get_d();
  }
  return m;
}

// ---- prime: exact moves.

struct PadicObjective {
  long worst;  // max over Q of the norm exponent
  long total;  // sum over Q, to break ties on plateaus
  friend bool operator<(const PadicObjective& a, const PadicObjective& b) {
    return a.worst != b.worst ? a.worst < b.worst : a.total < b.total;
  }
};

// Exponent e with ||m||_p = p^e; a very negative value for the zero matrix.
long norm_exponent(const QMatrix& m, unsigned long p) {
  long best = std::numeric_limits<long>::min() / 4;
  for (auto const& x : m.data()) {
    if (x != 0) best = std::max(best, -exact::valuation(x, p));
  }
  return best;
}

PadicObjective padic_objective(const std::vector<QMatrix>& q, const QMatrix& g, const QMatrix& gi, unsigned long p) {
  PadicObjective o{std::numeric_limits<long>::min() / 4, 0};
  for (auto const& a : q) {
    long const e = norm_exponent(g * a * gi, p);
    o.worst = std::max(o.worst, e);
    o.total += std::max(e, -1000L);
  }
  return o;
}

struct PadicRestart {
  QMatrix g, gi;
  PadicObjective value{0, 0};
  long sweeps = 0;
};

PadicRestart padic_descent(const std::vector<QMatrix>& q, unsigned long p, QMatrix g, int max_sweeps) {
  std::size_t const d = g.rows();
  QMatrix gi = exact::inverse(g);
  PadicObjective best = padic_objective(q, g, gi, p);
  Rational const pp(static_cast<long>(p));
  // Left multiplications by a move and its inverse.
  std::vector<std::pair<QMatrix, QMatrix>> moves;
  for (std::size_t i = 0; i < d; ++i) {
    QMatrix up = QMatrix::identity(d), down = QMatrix::identity(d);
    up(i, i) = pp;
    down(i, i) = 1 / pp;
    moves.emplace_back(up, down);
    moves.emplace_back(down, up);
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      for (long c : {1L, -1L}) {
        QMatrix s = QMatrix::identity(d), si = QMatrix::identity(d);
        s(i, j) = c;
        si(i, j) = -c;
        moves.emplace_back(s, si);
      }
    }
  }
  long sweeps = 0;
  while (sweeps < max_sweeps) {
    ++sweeps;
    bool improved = false;
    for (auto const& [m, mi] : moves) {
      QMatrix const g2 = m * g;
      QMatrix const gi2 = gi * mi;
      PadicObjective const o = padic_objective(q, g2, gi2, p);
      if (o < best) {
        best = o;
        g = g2;
        gi = gi2;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return PadicRestart{std::move(g), std::move(gi), best, sweeps};
}

}  // namespace

DeltaResult delta_upper(const CompactSet& q, const DeltaBudget& budget, const std::optional<QMatrix>& warm_start) {
  if (q.elements.empty()) throw Error(ErrorCode::PreconditionViolated, "empty compact set");
  std::size_t const d = q.elements.front().rows();
  Place const v = q.place;
  int const restarts = std::max(1, budget.restarts);

  struct Candidate {
    QMatrix g;
    int restart;
    long sweeps;
    double step;
  };
  std::vector<Candidate> cands;
  long total_sweeps = 0;

  if (v.is_infinite()) {
    RealSearch s{{}, d};
    for (auto const& a : q.elements) s.q.push_back(to_double(a));
    std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
    parallel_for(results.size(), [&](std::size_t r) {
      std::vector<double> theta(s.params(), 0.0);
      if (r > 0) {
        std::mt19937_64 rng(budget.seed + 0x9e3779b97f4a7c15ULL * r);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (auto& t : theta) t = u(rng);
      }
      results[r] = coordinate_descent(s, std::move(theta), budget.max_sweeps);
    });
    std::size_t best = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
      total_sweeps += results[r].sweeps;
      if (results[r].value < results[best].value) best = r;
    }
    cands.push_back(Candidate{to_rational(s.conjugator(results[best].theta)), static_cast<int>(best),
                              results[best].sweeps, results[best].step});
  } else {
    std::vector<PadicRestart> results(static_cast<std::size_t>(restarts));
    parallel_for(results.size(), [&](std::size_t r) {
      QMatrix g = QMatrix::identity(d);
      if (r > 0) {
        std::mt19937_64 rng(budget.seed + 0x9e3779b97f4a7c15ULL * r);
        std::uniform_int_distribution<long> u(-2, 2);
        for (std::size_t i = 0; i < d; ++i) g(i, i) = exact::power(Rational(static_cast<long>(v.p)), u(rng));
      }
      results[r] = padic_descent(q.elements, v.p, std::move(g), budget.max_sweeps);
    });
    std::size_t best = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
      total_sweeps += results[r].sweeps;
      if (results[r].value < results[best].value) best = r;
    }
    cands.push_back(Candidate{results[best].g, static_cast<int>(best), results[best].sweeps, 0});
  }
  if (warm_start) cands.push_back(Candidate{*warm_start, -1, 0, 0});
  cands.push_back(Candidate{QMatrix::identity(d), -2, 0, 0});

  std::optional<DeltaResult> out;
  for (auto const& c : cands) {
    LocalScalar const val = set_norm(q.elements, c.g, exact::inverse(c.g), v);
    // Keep the first candidate unless another is certified smaller.
    if (out && places::compare(val, out->value, Relation::Lt) != Verdict::True) continue;
    ConjugatorSearchState st{c.g, val, budget.seed, restarts, c.restart, total_sweeps, c.step};
    out = DeltaResult{val, std::move(st)};
  }
  return *out;
}

namespace {

// log |x|_v, natural at infinity and base p at a prime.  nullopt for zero.
std::optional<Interval> log_magnitude(const LocalScalar& x) {
  if (x.place.is_infinite()) {
    if (!x.value.positive()) {
      if (x.value.hi() == 0) return std::nullopt;
      throw Error(ErrorCode::PrecisionExhausted, "magnitude not certified nonzero");
    }
    return places::log(x.value);
  }
  if (x.log_p) return Interval(*x.log_p);
  if (x.value.hi() == 0) return std::nullopt;
  return places::log(x.value) / places::log(Interval(static_cast<long>(x.place.p)));
}

Interval exp_magnitude(const Interval& l, Place v) {
  if (v.is_infinite()) return places::exp(l);
  return places::exp(l * places::log(Interval(static_cast<long>(v.p))));
}

}  // namespace

namespace {

QMatrix kron(const QMatrix& a, const QMatrix& b) {
  std::size_t const n = a.rows(), m = b.rows();
  QMatrix out(n * m, n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = a(i, j) * b(k, l);
      }
    }
  }
  return out;
}

// Lambda(P) <= Delta^i for every product P, where Delta is the largest norm
// of the conjugated elements.  Enclosures that overlap are resolved exactly:
// Lambda(P)^2 is a root of char(P (x) P), ||M||^{2i} a root of
// char((M^T M)^i), and a shared root inside both enclosures proves equality.
Verdict lambda_power_verdict(const std::vector<QMatrix>& prods, const std::vector<QMatrix>& conjugated,
                             const std::vector<LocalScalar>& norms, const LocalScalar& delta, int i, Place v) {
  LocalScalar const bound = places::pow(delta, static_cast<unsigned long>(i));
  Verdict overall = Verdict::True;
  for (auto const& p : prods) {
    LocalScalar const l = places::max_eig_abs(p, v);
    Verdict const verdict = places::compare(l, bound, Relation::Le);
    if (verdict == Verdict::True) continue;
    if (verdict == Verdict::False) return Verdict::False;
    bool tie = false;
    if (v.is_infinite()) {
      auto const f = exact::char_poly(kron(p, p));
      for (std::size_t k = 0; k < conjugated.size() && !tie; ++k) {
        if (places::compare(norms[k], delta, Relation::Lt) == Verdict::True) continue;
        QMatrix const mtm = conjugated[k].transpose() * conjugated[k];
        auto const g = exact::char_poly(exact::power(mtm, i));
        tie = places::roots_coincide(f, places::sqr(l.value), g,
                                     places::pow(places::sqr(norms[k].value), static_cast<unsigned long>(i)));
      }
    }
    if (!tie) overall = Verdict::Undecided;
  }
  return overall;
}

}  // namespace

ComparisonReport comparison_experiment(const CompactSet& q, const DeltaBudget& budget, int max_i, std::size_t cap) {
  if (q.elements.empty()) throw Error(ErrorCode::PreconditionViolated, "empty compact set");
  ComparisonReport rep;
  rep.dim = q.elements.front().rows();
  if (max_i <= 0) max_i = static_cast<int>(rep.dim * rep.dim);
  rep.delta = delta_upper(q, budget);
  QMatrix const& c = rep.delta.state.conjugator;
  QMatrix const ci = exact::inverse(c);
  std::vector<QMatrix> conjugated;
  std::vector<LocalScalar> norms;
  for (auto const& a : q.elements) {
    conjugated.push_back(c * a * ci);
    norms.push_back(places::op_norm(conjugated.back(), q.place));
  }
  std::optional<Interval> best_root;
  for (int i = 1; i <= max_i; ++i) {
    auto const prods = power_set(q.elements, i, cap);
    LocalScalar l = places::max_eig_abs(prods.front(), q.place);
    for (std::size_t k = 1; k < prods.size(); ++k) l = places::max(l, places::max_eig_abs(prods[k], q.place));
    rep.lambdas.push_back(l);
    Comparison cmp = dynamics::make_comparison("Lambda(Q^" + std::to_string(i) + ") <= delta^" + std::to_string(i), l,
                                               Relation::Le,
                                               places::pow(rep.delta.value, static_cast<unsigned long>(i)));
    if (cmp.verdict == Verdict::Undecided) {
      cmp.verdict = lambda_power_verdict(prods, conjugated, norms, rep.delta.value, i, q.place);
    }
    rep.checks.push_back(std::move(cmp));
    auto const lg = log_magnitude(l);
    Interval const root = lg ? exp_magnitude(*lg / Interval(static_cast<long>(i)), q.place) : Interval(0L);
    if (!best_root || root.mid() > best_root->mid()) {
      best_root = root;
      rep.i_star = i;
    }
  }
  rep.lambda_root = *best_root;
  rep.ratio = rep.delta.value.value.positive() ? rep.lambda_root / rep.delta.value.value : Interval(0L);
  return rep;
}

namespace {

// Basis (as flattened rows) of the span of the given matrices.
std::vector<QMatrix> span_basis(const std::vector<QMatrix>& ms) {
  if (ms.empty()) return {};
  std::size_t const n = ms.front().rows();
  QMatrix rows(ms.size(), n * n);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    for (std::size_t e = 0; e < n * n; ++e) rows(k, e) = ms[k].data()[e];
  }
  auto const pivots = exact::row_reduce(rows);
  std::vector<QMatrix> out;
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    QMatrix m(n, n);
    for (std::size_t e = 0; e < n * n; ++e) m(e / n, e % n) = rows(k, e);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

bool nilpotency_test(const CompactSet& q) {
  if (q.elements.empty()) throw Error(ErrorCode::PreconditionViolated, "empty compact set");
  std::size_t const d = q.elements.front().rows();
  // The span of the union of Q^j stabilises after at most d^2 steps.
  std::vector<QMatrix> algebra = span_basis(q.elements);
  for (std::size_t step = 0; step < d * d; ++step) {
    std::vector<QMatrix> grown = algebra;
    for (auto const& b : algebra) {
      for (auto const& a : q.elements) grown.push_back(b * a);
    }
    grown = span_basis(grown);
    if (grown.size() == algebra.size()) break;
    algebra = std::move(grown);
  }
  // A nilpotent subalgebra of M_d satisfies A^d = 0.
  std::vector<QMatrix> power = algebra;
  for (std::size_t k = 1; k <= d && !power.empty(); ++k) {
    std::vector<QMatrix> next;
    for (auto const& p : power) {
      for (auto const& a : algebra) next.push_back(p * a);
    }
    power = span_basis(next);
  }
  return power.empty();
}

bool lambda_zero(const std::vector<QMatrix>& q, int i) {
  for (auto const& m : power_set(q, i)) {
    auto const chi = exact::char_poly(m);
    for (std::size_t k = 0; k + 1 < chi.coefficients().size(); ++k) {
      if (chi.coefficients()[k] != 0) return false;
    }
  }
  return true;
}

namespace {

// log a_i(g), largest first.
std::vector<Interval> log_cartan(const QMatrix& g, Place v) {
  std::vector<Interval> out;
  if (v.is_infinite()) {
    for (auto const& a : projgeom::cartan(g, v).a) out.push_back(places::log(a.value));
  } else {
    for (long j : projgeom::smith_form(g, v.p).exponents) out.emplace_back(-j);
  }
  return out;
}

}  // namespace

LocalScalar displacement(const QMatrix& g, Place v) {
  Interval s(0L);
  for (auto const& l : log_cartan(g, v)) s += places::sqr(l);
  return LocalScalar{v, places::sqrt(s), {}};
}

Transcript sandwich_checks(const QMatrix& h, Place v) {
  auto l = log_cartan(h, v);
  std::size_t const d = l.size();
  // det = 1: the last logarithm is minus the sum of the others, which keeps
  // the d = 2 upper bound an exact identity.
  Interval rest(0L);
  for (std::size_t i = 1; i + 1 < d; ++i) rest += l[i];
  Interval lower(0L);
  for (std::size_t i = 1; i + 1 < d; ++i) lower += places::sqr(l[i]);
  lower += places::sqr(l[0] + rest);
  // d l_1^2 - sum l_i^2 = sum_{i >= 2} (l_1 - l_i)(l_1 + l_i).
  Interval upper(0L);
  for (std::size_t i = 1; i + 1 < d; ++i) upper += (l[0] - l[i]) * (l[0] + l[i]);
  upper += (Interval(2L) * l[0] + rest) * (-rest);
  Transcript t;
  LocalScalar const zero = LocalScalar::at_infinity(Interval(0L));
  t.push_back(dynamics::make_comparison("disp^2 - log||h||^2", LocalScalar::at_infinity(lower), Relation::Ge, zero));
  t.push_back(
      dynamics::make_comparison("d log||h||^2 - disp^2", LocalScalar::at_infinity(upper), Relation::Ge, zero));
  return t;
}

GeometricReport geometric_comparison(const CompactSet& q, const DeltaBudget& budget, std::size_t cap) {
  if (q.elements.empty()) throw Error(ErrorCode::PreconditionViolated, "empty compact set");
  GeometricReport rep;
  std::size_t const d = q.elements.front().rows();
  rep.delta = delta_upper(q, budget);
  QMatrix const& c = rep.delta.state.conjugator;
  QMatrix const ci = exact::inverse(c);
  rep.d_q = Interval(0L);
  for (auto const& a : q.elements) rep.d_q = places::max(rep.d_q, displacement(c * a * ci, q.place).value);
  bool found = false;
  for (int i = 1; i <= static_cast<int>(d * d); ++i) {
    for (auto const& g : power_set(q.elements, i, cap)) {
      auto const lg = log_magnitude(places::max_eig_abs(g, q.place));
      if (!lg) continue;
      if (!found || lg->mid() > rep.best_log_lambda.mid()) {
        rep.best_log_lambda = *lg;
        rep.best_element = g;
        rep.best_power = i;
        found = true;
      }
    }
  }
  if (!found) {
    rep.best_log_lambda = Interval(0L);
    rep.best_element = QMatrix::identity(d);
    rep.best_power = 1;
  }
  Interval const dd(static_cast<long>(d));
  rep.lower_gap = rep.d_q / places::sqrt(dd) - rep.best_log_lambda;
  rep.checks.push_back(dynamics::make_comparison("log Lambda(g) <= d^2 d_Q",
                                                 LocalScalar::at_infinity(rep.best_log_lambda), Relation::Le,
                                                 LocalScalar::at_infinity(dd * dd * rep.d_q)));
  return rep;
}

}  // namespace pingpong::comparison
