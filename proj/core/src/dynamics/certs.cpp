#include "pingpong/dynamics/certs.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/parallel.hpp"
#include "pingpong/places/norms.hpp"

namespace pingpong::dynamics {

using places::Interval;
using places::PAdic;
using projgeom::LocalVector;

Comparison make_comparison(std::string label, LocalScalar lhs, Relation rel, LocalScalar rhs) {
  Verdict const v = places::compare(lhs, rhs, rel);
  return Comparison{std::move(label), std::move(lhs), rel, std::move(rhs), v};
}

bool all_true(const Transcript& t) {
  return std::all_of(t.begin(), t.end(), [](const Comparison& c) { return c.verdict == Verdict::True; });
}

std::string_view to_string(Method m) {
  return m == Method::CartanCriterion ? "cartan-criterion" : "grid-verified";
}

Method parse_method(std::string_view text) {
  if (text == "cartan-criterion") return Method::CartanCriterion;
  if (text == "grid-verified") return Method::GridVerified;
  throw Error(ErrorCode::ParseError, "unknown certification method '" + std::string(text) + "'");
}

namespace {

// |q| as a magnitude at `place`: p^k exactly when q is a power of p.
LocalScalar magnitude(Place place, const Rational& q) {
  if (!place.is_infinite() && q > 0) {
    long const k = exact::valuation(q, place.p);
    if (exact::power(Rational(static_cast<long>(place.p)), k) == q) {
      return LocalScalar::p_power(place.p, Rational(k));
    }
  }
  return LocalScalar{place, Interval(q), {}};
}

LocalScalar real(const Interval& x) { return LocalScalar::at_infinity(x); }

// Everything the criterion needs from the Cartan decomposition of `a`.
struct CartanView {
  LocalScalar sigma;  // a_2 / a_1
  ProjPoint attracting;
  ProjHyperplane repelling;
};

std::optional<CartanView> cartan_view(const QMatrix& a, Place place) {
  auto const c = projgeom::cartan(a, place, true);
  if (!c.attracting || !c.repelling) return std::nullopt;
  return CartanView{c.ratio(), *c.attracting, *c.repelling};
}

void check_input(const QMatrix& a, const QVector& v, const QVector& h, const Rational& eps) {
  if (!a.is_square() || a.dim() < 2 || v.size() != a.dim() || h.size() != a.dim()) {
    throw Error(ErrorCode::PreconditionViolated, "contraction data has mismatched dimensions");
  }
  if (eps <= 0) throw Error(ErrorCode::PreconditionViolated, "epsilon must be positive");
}

}  // namespace

Transcript cartan_contraction_transcript(const QMatrix& a, Place place, const Rational& eps,
                                         const QVector& v, const QVector& h) {
  check_input(a, v, h, eps);
  auto const view = cartan_view(a, place);
  LocalScalar const e = magnitude(place, eps);
  Transcript t;
  if (!view) {
    // a_1 = a_2 (or not separable): record the failing gap comparison.
    auto const c = projgeom::cartan(a, place, false);
    t.push_back(make_comparison("cartan ratio", c.ratio(), Relation::Le, e * e));
    t.back().verdict = Verdict::False;
    return t;
  }
  ProjPoint const pv = ProjPoint::from_rational(v, place);
  ProjHyperplane const ph = ProjHyperplane::from_rational(h, place);
  LocalScalar const dv = projgeom::proj_dist(pv, view->attracting);
  LocalScalar const dh = projgeom::form_distance(ph, view->repelling);

  t.push_back(make_comparison("cartan ratio", view->sigma, Relation::Le, e * e));
  t.push_back(make_comparison("repelling offset", dh, Relation::Lt, e));
  if (t.back().verdict != Verdict::True) return t;
  LocalScalar bound;
  if (place.is_infinite()) {
    // d(x, H_g) >= eps - dh on {d(x, H) >= eps}.
    Interval const eta = Interval(eps) - dh.value;
    bound = real(view->sigma.value / eta + dv.value);
  } else {
    // Ultrametric: d(x, H_g) = d(x, H) there, and distances combine by max.
    bound = places::max(view->sigma / e, dv);
  }
  t.push_back(make_comparison("contraction bound", bound, Relation::Le, e));
  return t;
}

ContractionCert certify_contraction(const QMatrix& a, Place place, const Rational& eps,
                                    const QVector& v, const QVector& h) {
  Transcript t = cartan_contraction_transcript(a, place, eps, v, h);
  for (auto const& c : t) {
    if (c.verdict != Verdict::True) {
      throw Error(ErrorCode::CriterionFails, c.label + " not certified: " + c.lhs.to_string() + " " +
                                                 std::string(places::to_string(c.relation)) + " " +
                                                 c.rhs.to_string());
    }
  }
  return ContractionCert{place, eps, v, h, Method::CartanCriterion, std::move(t), 0};
}

namespace {

// Rational data for the Cartan directions.
std::pair<QVector, QVector> rational_directions(const CartanView& view) {
  unsigned long const bits = places::working_precision();
  return {projgeom::rational_approximation(view.attracting.rep, bits),
          projgeom::rational_approximation(view.repelling.form, bits)};
}

}  // namespace

ContractionCert contraction_from_cartan(const QMatrix& a, Place place, const Rational& eps) {
  if (eps <= 0) throw Error(ErrorCode::PreconditionViolated, "epsilon must be positive");
  auto const view = cartan_view(a, place);
  if (!view) throw Error(ErrorCode::CriterionFails, "a_1 > a_2 not certified");
  LocalScalar const e = magnitude(place, eps);
  if (places::compare(view->sigma, e * e, Relation::Le) != Verdict::True) {
    throw Error(ErrorCode::CriterionFails, "a_2/a_1 = " + view->sigma.to_string() + " not certified <= eps^2");
  }
  auto const [v, h] = rational_directions(*view);
  return certify_contraction(a, place, eps, v, h);
}

std::optional<CartanCandidate> cartan_candidate(const QMatrix& a, Place place) {
  auto const view = cartan_view(a, place);
  if (!view) return std::nullopt;
  auto const [v, h] = rational_directions(*view);
  ProjPoint const pv = ProjPoint::from_rational(v, place);
  ProjHyperplane const ph = ProjHyperplane::from_rational(h, place);
  LocalScalar const dv = projgeom::proj_dist(pv, view->attracting);
  LocalScalar const dh = projgeom::form_distance(ph, view->repelling);
  if (place.is_infinite()) {
    // Smallest eps with sigma / (eps - dh) + dv <= eps, plus a margin.
    Rational const s = view->sigma.value.hi();
    Rational const x = dh.value.hi();
    Rational const y = dv.value.hi();
    Interval const disc = places::sqrt(Interval((x - y) * (x - y) + 4 * s));
    Rational const root = (x + y + disc.hi()) / 2;
    Rational const eps = places::round_up(root + root / (Rational(1) << 20) + x / 4, 24);
    return CartanCandidate{v, h, eps};
  }
  // Exponents of the p-adic magnitudes; eps = p^-k.
  auto floor_of = [](const Rational& q) {
    exact::Integer f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f.get_si();
  };
  Rational const log_sigma = *view->sigma.log_p;
  long k = floor_of(-log_sigma / 2);
  if (dv.value.hi() != 0) {
    if (!dv.log_p) return std::nullopt;
    k = std::min(k, floor_of(-*dv.log_p));
  }
  if (dh.value.hi() != 0) {
    if (!dh.log_p) return std::nullopt;
    k = std::min(k, floor_of(-*dh.log_p) - 1);
  }
  Rational const eps = exact::power(Rational(static_cast<long>(place.p)), -k);
  return CartanCandidate{v, h, eps};
}

// ---------------------------------------------------------------------------
// Grid verification

namespace {

// A chart cell: coordinate `chart` fixed to 1, the others in boxes (infinity)
// or residue balls c + p^k Z_p (prime).
struct Cell {
  std::size_t chart = 0;
  std::vector<Rational> lo, hi;  // infinity
  std::vector<Rational> center;  // prime
  std::vector<long> depth;       // prime
};

enum class CellOutcome { Accepted, Witness, Split };

struct CellResult {
  CellOutcome outcome = CellOutcome::Split;
  QVector witness;
  std::vector<Cell> children;
};

class GridVerifier {
 public:
  GridVerifier(const QMatrix& a, Place place, const Rational& eps, const QVector& v, const QVector& h)
      : a_(a), place_(place), eps_(eps), e_(magnitude(place, eps)),
        v_(ProjPoint::from_rational(v, place)), h_(ProjHyperplane::from_rational(h, place)) {}

  std::vector<Cell> initial_cells() const {
    std::size_t const n = a_.dim();
    std::vector<Cell> cells;
    for (std::size_t j = 0; j < n; ++j) {
      Cell c;
      c.chart = j;
      if (place_.is_infinite()) {
        c.lo.assign(n, Rational(-1));
        c.hi.assign(n, Rational(1));
        c.lo[j] = c.hi[j] = 1;
      } else {
        // |x_i| < 1 before the chart coordinate, <= 1 after it.
        c.center.assign(n, Rational(0));
        c.center[j] = 1;
        c.depth.assign(n, 0);
        for (std::size_t i = 0; i < j; ++i) c.depth[i] = 1;
      }
      cells.push_back(std::move(c));
    }
    return cells;
  }

  CellResult process(const Cell& c) const {
    CellResult r;
    try {
      ProjPoint const x = cell_point(c);
      if (places::compare(projgeom::dist_to_hyperplane(x, h_), e_, Relation::Lt) == Verdict::True) {
        r.outcome = CellOutcome::Accepted;
        return r;
      }
      ProjPoint const gx = projgeom::apply(a_, x);
      if (places::compare(projgeom::proj_dist(gx, v_), e_, Relation::Le) == Verdict::True) {
        r.outcome = CellOutcome::Accepted;
        return r;
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::PrecisionExhausted) throw;
    }
    QVector const mid = cell_center(c);
    ProjPoint const m = ProjPoint::from_rational(mid, place_);
    if (places::compare(projgeom::dist_to_hyperplane(m, h_), e_, Relation::Ge) == Verdict::True &&
        places::compare(projgeom::proj_dist(projgeom::apply(a_, m), v_), e_, Relation::Gt) == Verdict::True) {
      r.outcome = CellOutcome::Witness;
      r.witness = mid;
      return r;
    }
    r.outcome = CellOutcome::Split;
    r.children = split(c);
    return r;
  }

 private:
  ProjPoint cell_point(const Cell& c) const {
    std::size_t const n = a_.dim();
    LocalVector rep{place_, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (place_.is_infinite()) {
        rep.real.emplace_back(c.lo[i], c.hi[i]);
      } else if (i == c.chart) {
        rep.padic.emplace_back(place_.p, Rational(1));
      } else {
        rep.padic.emplace_back(place_.p, c.center[i], c.depth[i]);
      }
    }
    return ProjPoint::from_local(std::move(rep));
  }

  QVector cell_center(const Cell& c) const {
    if (!place_.is_infinite()) return c.center;
    QVector m;
    for (std::size_t i = 0; i < c.lo.size(); ++i) m.push_back((c.lo[i] + c.hi[i]) / 2);
    return m;
  }

  std::vector<Cell> split(const Cell& c) const {
    std::size_t const n = a_.dim();
    std::vector<Cell> out;
    std::size_t best = n;
    if (place_.is_infinite()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i == c.chart) continue;
        if (best == n || c.hi[i] - c.lo[i] > c.hi[best] - c.lo[best]) best = i;
      }
      Rational const m = (c.lo[best] + c.hi[best]) / 2;
      Cell left = c, right = c;
      left.hi[best] = m;
      right.lo[best] = m;
      out.push_back(std::move(left));
      out.push_back(std::move(right));
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c.chart) continue;
      if (best == n || c.depth[i] < c.depth[best]) best = i;
    }
    Rational const step = exact::power(Rational(static_cast<long>(place_.p)), c.depth[best]);
    for (unsigned long t = 0; t < place_.p; ++t) {
      Cell child = c;
      child.center[best] = c.center[best] + Rational(static_cast<long>(t)) * step;
      child.depth[best] = c.depth[best] + 1;
      out.push_back(std::move(child));
    }
    return out;
  }

  QMatrix a_;
  Place place_;
  Rational eps_;
  LocalScalar e_;
  ProjPoint v_;
  ProjHyperplane h_;
};

std::string vector_string(const QVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + exact::to_string(v[i]);
  return s + ")";
}

}  // namespace

ContractionCert verify_contracting(const QMatrix& a, Place place, const Rational& eps, const QVector& v,
                                   const QVector& h, std::size_t cell_cap) {
  check_input(a, v, h, eps);
  GridVerifier const grid(a, place, eps, v, h);
  std::vector<Cell> pending = grid.initial_cells();
  std::size_t processed = 0;
  while (!pending.empty()) {
    if (processed + pending.size() > cell_cap) {
      throw Error(ErrorCode::PrecisionExhausted,
                  "grid verification exceeded " + std::to_string(cell_cap) + " cells");
    }
    std::vector<CellResult> results(pending.size());
    parallel_for(pending.size(), [&](std::size_t i) { results[i] = grid.process(pending[i]); });
    processed += pending.size();
    std::vector<Cell> next;
    for (auto& r : results) {
      if (r.outcome == CellOutcome::Witness) {
        throw Error(ErrorCode::VerificationFails,
                    "point " + vector_string(r.witness) + " is eps-far from H but its image is not eps-close to v");
      }
      for (auto& c : r.children) next.push_back(std::move(c));
    }
    pending = std::move(next);
  }
  return ContractionCert{place, eps, v, h, Method::GridVerified, {}, processed};
}

// ---------------------------------------------------------------------------
// Proximality and ping-pong

Rational separation_lower_bound(Place place, const QVector& v, const QVector& h) {
  LocalScalar const d =
      projgeom::dist_to_hyperplane(ProjPoint::from_rational(v, place), ProjHyperplane::from_rational(h, place));
  if (!place.is_infinite()) {
    if (d.log_p && d.log_p->get_den() == 1) {
      return exact::power(Rational(static_cast<long>(place.p)), d.log_p->get_num().get_si());
    }
    return places::round_down(d.value.lo(), 24);
  }
  return places::round_down(d.value.lo(), 24);
}

ProximalCert make_proximal(ContractionCert contraction, const Rational& r) {
  if (!(r > 2 * contraction.epsilon)) {
    throw Error(ErrorCode::PreconditionViolated, "proximality needs r > 2 eps");
  }
  Place const place = contraction.place;
  LocalScalar const d = projgeom::dist_to_hyperplane(ProjPoint::from_rational(contraction.attracting, place),
                                                     ProjHyperplane::from_rational(contraction.repelling, place));
  Comparison sep = make_comparison("attracting to repelling", d, Relation::Ge, magnitude(place, r));
  if (sep.verdict != Verdict::True) {
    throw Error(ErrorCode::CriterionFails, "d(v, H) = " + d.to_string() + " not certified >= r");
  }
  return ProximalCert{std::move(contraction), r, std::move(sep)};
}

Transcript ping_pong_transcript(Place place, const VeryProximalCert& cx, const VeryProximalCert& cy,
                                const Rational& r) {
  struct Player {
    std::string name;
    const ContractionCert* c;
  };
  std::vector<Player> const xs{{"x", &cx.forward.contraction}, {"x^-1", &cx.backward.contraction}};
  std::vector<Player> const ys{{"y", &cy.forward.contraction}, {"y^-1", &cy.backward.contraction}};
  LocalScalar const rr = magnitude(place, r);
  Transcript t;
  auto add = [&](const Player& att, const Player& rep) {
    LocalScalar const d = projgeom::dist_to_hyperplane(ProjPoint::from_rational(att.c->attracting, place),
                                                       ProjHyperplane::from_rational(rep.c->repelling, place));
    t.push_back(make_comparison("attracting(" + att.name + ") to repelling(" + rep.name + ")", d, Relation::Ge, rr));
  };
  for (auto const& a : xs) {
    for (auto const& b : ys) add(a, b);
  }
  for (auto const& a : ys) {
    for (auto const& b : xs) add(a, b);
  }
  return t;
}

PingPongCert verify_ping_pong(const QMatrix& x, const QMatrix& y, const VeryProximalCert& cx,
                              const VeryProximalCert& cy, Word word_x, Word word_y) {
  std::vector<const ProximalCert*> const all{&cx.forward, &cx.backward, &cy.forward, &cy.backward};
  Place const place = all.front()->contraction.place;
  Rational const r = all.front()->r;
  Rational const eps = all.front()->contraction.epsilon;
  for (auto const* p : all) {
    if (p->contraction.place != place || p->r != r || p->contraction.epsilon != eps) {
      throw Error(ErrorCode::PreconditionViolated, "certificates do not share a place and (r, eps)");
    }
  }
  if (!(r > 2 * eps)) throw Error(ErrorCode::PreconditionViolated, "ping-pong needs r > 2 eps");
  Transcript t = ping_pong_transcript(place, cx, cy, r);
  std::string failing;
  for (auto const& c : t) {
    if (c.verdict != Verdict::True) failing += (failing.empty() ? "" : "; ") + c.label + " = " + c.lhs.to_string();
  }
  if (!failing.empty()) throw Error(ErrorCode::SeparationFails, failing);
  return PingPongCert{place, std::move(word_x), std::move(word_y), x, y, cx, cy, r, eps, std::move(t)};
}

PingPongCert ping_pong_from_cartan(const QMatrix& x, const QMatrix& y, Place place, Word word_x,
                                   Word word_y, std::size_t grid_cap) {
  std::vector<QMatrix> const gs{x, exact::inverse(x), y, exact::inverse(y)};
  std::vector<CartanCandidate> cands;
  Rational eps(0);
  for (auto const& g : gs) {
    auto c = cartan_candidate(g, place);
    if (!c) throw Error(ErrorCode::CriterionFails, "no Cartan gap at " + place.to_string());
    eps = std::max(eps, c->epsilon);
    cands.push_back(std::move(*c));
  }
  // Common r: every self separation and every cross separation.
  Rational r(1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      bool const same_player = (i < 2) == (j < 2);
      if (same_player && i != j) continue;
      r = std::min(r, separation_lower_bound(place, cands[i].attracting, cands[j].repelling));
    }
  }
  if (!(r > 2 * eps)) {
    throw Error(ErrorCode::PreconditionViolated, "separation " + exact::to_string(r) + " does not exceed 2 eps = " +
                                                     exact::to_string(2 * eps));
  }
  std::vector<ProximalCert> prox;
  for (std::size_t i = 0; i < 4; ++i) {
    ContractionCert cc;
    try {
      cc = certify_contraction(gs[i], place, eps, cands[i].attracting, cands[i].repelling);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CriterionFails || grid_cap == 0) throw;
      cc = verify_contracting(gs[i], place, eps, cands[i].attracting, cands[i].repelling, grid_cap);
    }
    prox.push_back(make_proximal(std::move(cc), r));
  }
  VeryProximalCert const cx{prox[0], prox[1]};
  VeryProximalCert const cy{prox[2], prox[3]};
  return verify_ping_pong(x, y, cx, cy, std::move(word_x), std::move(word_y));
}

// ---------------------------------------------------------------------------
// Free word oracle

namespace {

bool is_identity(const QMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) != (i == j ? 1 : 0)) return false;
    }
  }
  return true;
}

bool word_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct Branch {
  const std::vector<QMatrix>* letters;
  int max_len;
  std::size_t cap;
  std::atomic<std::size_t>* total;
  std::vector<int> word;
  std::vector<int> best;
  std::size_t checked = 0;

  void descend(const QMatrix& m) {
    int const len = static_cast<int>(word.size());
    ++checked;
    if (total->fetch_add(1) >= cap) throw Error(ErrorCode::BudgetExceeded, "free word oracle budget exhausted");
    if (is_identity(m)) {
      if (best.empty() || word_less(word, best)) best = word;
      return;  // extensions are never shorter
    }
    if (len >= max_len) return;
    if (!best.empty() && len + 1 > static_cast<int>(best.size())) return;
    for (int l = 0; l < 4; ++l) {
      if ((l ^ 1) == word.back()) continue;
      word.push_back(l);
      descend(m * (*letters)[l]);
      word.pop_back();
    }
  }
};

}  // namespace

OracleResult free_word_oracle(const QMatrix& x, const QMatrix& y, int L, std::size_t word_cap) {
  if (L < 1) throw Error(ErrorCode::PreconditionViolated, "oracle depth must be >= 1");
  std::vector<QMatrix> const letters{x, exact::inverse(x), y, exact::inverse(y)};
  // Branch on the first two letters for load balance.
  std::vector<std::vector<int>> prefixes;
  for (int a = 0; a < 4; ++a) {
    prefixes.push_back({a});
  }
  std::atomic<std::size_t> total{0};
  std::vector<Branch> branches(prefixes.size());
  parallel_for(prefixes.size(), [&](std::size_t i) {
    Branch& b = branches[i];
    b.letters = &letters;
    b.max_len = L;
    b.cap = word_cap;
    b.total = &total;
    b.word = prefixes[i];
    b.descend(letters[static_cast<std::size_t>(prefixes[i][0])]);
  });
  OracleResult out;
  for (auto const& b : branches) {
    out.words_checked += b.checked;
    if (!b.best.empty() && (out.failing_word.empty() || word_less(b.best, out.failing_word))) {
      out.failing_word = b.best;
    }
  }
  out.free = out.failing_word.empty();
  return out;
}

std::string oracle_word_string(const std::vector<int>& w) {
  static char const* const names[] = {"x", "x^-1", "y", "y^-1"};
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + std::string(names[w[i]]);
  return s.empty() ? "e" : s;
}

}  // namespace pingpong::dynamics
