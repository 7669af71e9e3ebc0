#include "pingpong/construct/construct.hpp"

#include <algorithm>
#include <tuple>

#include "pingpong/exact/ball.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/parallel.hpp"
#include "pingpong/places/norms.hpp"
#include "pingpong/places/padic.hpp"
#include "pingpong/places/roots.hpp"

namespace pingpong::construct {

using dynamics::CartanCandidate;
using places::Interval;
using places::Relation;
using projgeom::ProjHyperplane;
using projgeom::ProjPoint;

namespace {

QMatrix rep_of(const QMatrix& m, std::size_t wedge) { return wedge == 1 ? m : exact::wedge_power(m, wedge); }

ProjPoint point(const QVector& v, Place place) { return ProjPoint::from_rational(v, place); }
ProjHyperplane plane(const QVector& f, Place place) { return ProjHyperplane::from_rational(f, place); }

QVector mul(const QMatrix& g, const QVector& v) {
  QVector out(g.rows(), Rational(0));
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) out[i] += g(i, j) * v[j];
  }
  return out;
}

// The form of g(ker f), given g^-1: f o g^-1.
QVector push_form(const QMatrix& g_inverse, const QVector& f) {
  QVector out(g_inverse.cols(), Rational(0));
  for (std::size_t j = 0; j < g_inverse.cols(); ++j) {
    for (std::size_t i = 0; i < g_inverse.rows(); ++i) out[j] += f[i] * g_inverse(i, j);
  }
  return out;
}

LocalScalar local_abs(const Rational& x, Place place) {
  if (place.is_infinite()) return LocalScalar::at_infinity(Interval(exact::abs(x)));
  if (x == 0) return LocalScalar::zero(place);
  return LocalScalar::p_power(place.p, Rational(-exact::valuation(x, place.p)));
}

LocalScalar magnitude(Place place, const Rational& q) {
  if (!place.is_infinite() && q > 0) {
    long const k = exact::valuation(q, place.p);
    if (exact::power(Rational(static_cast<long>(place.p)), k) == q) return LocalScalar::p_power(place.p, Rational(k));
  }
  return LocalScalar{place, Interval(q), {}};
}

// Contraction target for a separation r: r/4, kept a power of p at a prime.
Rational eps_for(Place place, const Rational& r) {
  if (place.is_infinite() || place.p == 2) return r / 4;
  return r / Rational(static_cast<long>(place.p));
}

bool contains_code(const Error& e, std::initializer_list<ErrorCode> codes) {
  return std::find(codes.begin(), codes.end(), e.code()) != codes.end();
}

// Cartan criterion with the given data, then the grid when the Cartan ratio
// already meets eps^2.
std::optional<ContractionCert> try_contraction(const QMatrix& g, Place place, const Rational& eps, const QVector& v,
                                               const QVector& h, std::size_t grid_cap) {
  try {
    return dynamics::certify_contraction(g, place, eps, v, h);
  } catch (const Error& e) {
    if (!contains_code(e, {ErrorCode::CriterionFails, ErrorCode::PrecisionExhausted})) throw;
  }
  if (grid_cap == 0) return std::nullopt;
  try {
    LocalScalar const e = magnitude(place, eps);
    if (places::compare(projgeom::cartan(g, place).ratio(), e * e, Relation::Le) != Verdict::True) return std::nullopt;
    return dynamics::verify_contracting(g, place, eps, v, h, grid_cap);
  } catch (const Error& e) {
    if (!contains_code(e, {ErrorCode::VerificationFails, ErrorCode::PrecisionExhausted})) throw;
  }
  return std::nullopt;
}

void check_length(const Word& w, const Config& cfg, const std::string& what) {
  if (w.length() > cfg.max_word_len) {
    throw Error(ErrorCode::BudgetExceeded, what + " needs a word of length " + std::to_string(w.length()) +
                                               " > max_word_len " + std::to_string(cfg.max_word_len));
  }
}

struct Gap {
  std::size_t index;
  LocalScalar ratio;
};

// Largest certified gap m[i-1] > m[i] in the modulus list.
std::optional<Gap> best_gap(const std::vector<LocalScalar>& m) {
  std::optional<Gap> best;
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (places::compare(m[i - 1], m[i], Relation::Gt) != Verdict::True) continue;
    LocalScalar const ratio = m[i - 1] / m[i];
    if (!best || ratio.value.mid() > best->ratio.value.mid()) best = Gap{i, ratio};
  }
  return best;
}

Interval eval(const exact::QPoly& f, const Interval& x) {
  auto const& c = f.coefficients();
  Interval acc(0L);
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + Interval(c[k]);
  return acc;
}

projgeom::LocalVector eval_vector(const search::AlgebraicVector& v, const Interval& x) {
  projgeom::LocalVector out{Place::infinity(), {}, {}};
  for (auto const& c : v.coords) out.real.push_back(eval(c, x));
  return out;
}

// Normalised p-adic power iteration x -> g x, truncated to `digits`.
QVector padic_power_iteration(const QMatrix& g, unsigned long p, long digits, const QVector& start) {
  QVector v = start;
  for (int it = 0; it < 20000; ++it) {
    QVector w = mul(g, v);
    std::size_t lead = w.size();
    long best = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == 0) continue;
      long const val = exact::valuation(w[i], p);
      if (lead == w.size() || val < best) {
        lead = i;
        best = val;
      }
    }
    if (lead == w.size()) throw Error(ErrorCode::PrecisionExhausted, "power iteration collapsed to zero");
    Rational const scale = w[lead];
    for (auto& x : w) x = places::truncate_padic(x / scale, p, digits);
    if (w == v) return w;
    v = std::move(w);
  }
  throw Error(ErrorCode::PrecisionExhausted, "p-adic power iteration did not settle");
}

}  // namespace

NotFoundError::NotFoundError(std::vector<std::string> diagnoses)
    : Error(ErrorCode::NotFound,
            [&] {
              std::string s = "no free pair found";
              for (std::size_t i = 0; i < diagnoses.size(); ++i) s += (i ? "; " : ": ") + diagnoses[i];
              return s;
            }()),
      diagnoses_(std::move(diagnoses)) {}

std::vector<Place> effective_places(const GenSet& sigma, const Config& cfg) {
  if (!cfg.places.empty()) return cfg.places;
  return places::places_of(sigma.support());
}

// ---------------------------------------------------------------------------
// Pivot

PivotSelection select_pivot(const GenSet& sigma, std::size_t search_len, const std::vector<Place>& plc) {
  if (search_len < 1) throw Error(ErrorCode::PreconditionViolated, "search length must be >= 1");
  auto const ball = exact::enumerate_ball(sigma, search_len);
  std::size_t const d = sigma.dim();

  // Per element: best (place, gap, top modulus) or nothing.
  struct Hit {
    bool ok = false;
    bool candidate = false;
    Place place;
    Gap gap{0, {}};
    LocalScalar top;
  };
  std::vector<Hit> hits(ball.elements.size());
  parallel_for(ball.elements.size(), [&](std::size_t k) {
    auto const& a = ball.elements[k].matrix;
    if (!exact::is_semisimple(a) || exact::is_torsion(a)) return;
    hits[k].candidate = true;
    for (auto const& place : plc) {
      auto const m = places::eigen_moduli(a, place);
      auto const g = best_gap(m);
      if (!g) continue;
      if (!hits[k].ok || m[0].value.mid() > hits[k].top.value.mid()) hits[k] = Hit{true, true, place, *g, m[0]};
    }
  });
  std::optional<std::size_t> best;
  PivotSelection sel;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (hits[k].candidate) ++sel.scanned;
    if (!hits[k].ok) continue;
    if (!best || hits[k].top.value.mid() > hits[*best].top.value.mid()) best = k;
  }
  if (!best) {
    throw Error(ErrorCode::NoGap, "no semisimple word of length <= " + std::to_string(search_len) +
                                      " has a certified eigenvalue modulus gap");
  }
  auto const& h = hits[*best];
  sel.word = ball.elements[*best].word;
  sel.a0 = ball.elements[*best].matrix;
  sel.place = h.place;
  sel.wedge = h.gap.index;
  sel.rep_dim = exact::binomial(d, sel.wedge);
  sel.gap = h.gap.ratio;
  QMatrix const rep = rep_of(sel.a0, sel.wedge);
  sel.lambda = places::max_eig_abs(rep, sel.place);
  std::optional<LocalScalar> norm;
  for (auto const& s : sigma.generators()) {
    LocalScalar const n = places::op_norm(rep_of(s, sel.wedge), sel.place);
    norm = norm ? places::max(*norm, n) : n;
  }
  sel.sigma_norm = *norm;
  sel.inequality = places::compare(places::pow(sel.gap, static_cast<unsigned long>(d * d)), sel.sigma_norm,
                                   Relation::Ge);
  return sel;
}

// ---------------------------------------------------------------------------
// Frame

SpectralFrame build_spectral_frame(const PivotSelection& sel, const Config& cfg) {
  SpectralFrame fr;
  fr.pivot = sel;
  Place const place = sel.place;
  fr.rep = rep_of(sel.a0, sel.wedge);
  fr.basis = search::integral_eigenvectors(fr.rep);
  auto const m = places::eigen_moduli(fr.rep, place);
  if (m.size() < 2 || places::compare(m[0], m[1], Relation::Gt) != Verdict::True) {
    throw Error(ErrorCode::NoGap, "wedge representation has no top eigenvalue gap");
  }
  LocalScalar const second = m[1];
  Rational const width = places::two_pow(-static_cast<long>(cfg.approx_bits + 16));

  // Every eigenvalue with local eigenvector data: (vector, form, |alpha|).
  struct Local {
    QVector vec;
    QVector form;
    bool exact;
    bool top;
  };
  std::vector<Local> local;
  bool all_local = true;
  for (auto const& piece : fr.basis.pieces) {
    if (piece.modulus.degree() == 1) {
      Rational const root = -piece.modulus.coefficient(0) / piece.modulus.leading();
      bool const top = places::compare(local_abs(root, place), second, Relation::Gt) == Verdict::True;
      for (std::size_t s = 0; s < piece.right.size(); ++s) {
        local.push_back({piece.right[s].at(root), piece.dual[s].at(root), true, top && piece.right.size() == 1});
      }
      continue;
    }
    if (!place.is_infinite()) {
      all_local = false;
      continue;
    }
    auto const roots = places::real_roots(piece.modulus, width);
    if (roots.size() != static_cast<std::size_t>(piece.modulus.degree())) all_local = false;
    for (auto const& rr : roots) {
      LocalScalar const mod = LocalScalar::at_infinity(places::abs(rr.enclosure));
      bool const top = places::compare(mod, second, Relation::Gt) == Verdict::True;
      for (std::size_t s = 0; s < piece.right.size(); ++s) {
        local.push_back({projgeom::rational_approximation(eval_vector(piece.right[s], rr.enclosure), cfg.approx_bits),
                         projgeom::rational_approximation(eval_vector(piece.dual[s], rr.enclosure), cfg.approx_bits),
                         false, top && piece.right.size() == 1});
      }
    }
  }
  auto const top_it = std::find_if(local.begin(), local.end(), [](const Local& l) { return l.top; });
  if (top_it != local.end()) {
    fr.top_vector = top_it->vec;
    fr.top_form = top_it->form;
    fr.top_exact = top_it->exact;
  } else if (!place.is_infinite()) {
    // The top eigenvalue is irrational over Q but lies in Q_p.
    std::size_t const n = fr.rep.rows();
    QMatrix const rt = fr.rep.transpose();
    bool done = false;
    for (std::size_t j = 0; j <= n && !done; ++j) {
      QVector start(n, Rational(j == n ? 1 : 0));
      if (j < n) start[j] = 1;
      QVector const v = padic_power_iteration(fr.rep, place.p, cfg.padic_digits, start);
      QVector const f = padic_power_iteration(rt, place.p, cfg.padic_digits, start);
      if (places::compare(projgeom::dist_to_hyperplane(point(v, place), plane(f, place)), LocalScalar::zero(place),
                          Relation::Gt) == Verdict::True) {
        fr.top_vector = v;
        fr.top_form = f;
        done = true;
      }
    }
    if (!done) throw Error(ErrorCode::PrecisionExhausted, "could not isolate the top eigenvector p-adically");
  } else {
    throw Error(ErrorCode::PrecisionExhausted, "top eigenvalue not isolated at infinity");
  }
  ProjPoint const u1 = point(fr.top_vector, place);
  fr.separation = projgeom::dist_to_hyperplane(u1, plane(fr.top_form, place));
  fr.residual = projgeom::proj_dist(projgeom::apply(fr.rep, u1), u1);

  std::size_t const n = fr.rep.rows();
  if (all_local && local.size() == n) {
    QMatrix pm(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) pm(i, j) = local[j].vec[i];
    }
    if (exact::det(pm) != 0) {
      QMatrix const dm = exact::inverse(pm);
      LocalScalar const a = places::op_norm(dm, place);
      LocalScalar const b = places::op_norm(pm, place);
      fr.diagonalizer = dm;
      fr.d_norm_sq = a * a;
      fr.d_inv_norm_sq = b * b;
      for (auto const& l : local) {
        fr.separations.push_back(projgeom::dist_to_hyperplane(point(l.vec, place), plane(l.form, place)));
      }
    }
  }
  return fr;
}

// ---------------------------------------------------------------------------
// Step 1: proximal A_1

ProximalStage build_proximal(const SpectralFrame& frame, const Config& cfg) {
  Place const place = frame.pivot.place;
  Rational const r = dynamics::separation_lower_bound(place, frame.top_vector, frame.top_form);
  if (!(r > 0)) throw Error(ErrorCode::CriterionFails, "top eigenvector not separated from its hyperplane");
  Rational const eps = eps_for(place, r);
  for (long e = 1; e <= cfg.exponent_cap; e *= 2) {
    Word const w = frame.pivot.word.power(e).reduced();
    check_length(w, cfg, "A_1 = A_0^" + std::to_string(e));
    QMatrix a1 = exact::power(frame.rep, e);
    if (auto cc = try_contraction(a1, place, eps, frame.top_vector, frame.top_form, cfg.grid_cap)) {
      return ProximalStage{e, std::move(a1), w, dynamics::make_proximal(std::move(*cc), r)};
    }
  }
  throw Error(ErrorCode::ExponentCapExceeded, "A_0 power not proximal below the exponent cap");
}

// ---------------------------------------------------------------------------
// Step 2: very contracting A_2

VeryContractingStage build_very_contracting(const ProximalStage& a1, const SpectralFrame& frame,
                                            const GenSet& sigma, const Config& cfg,
                                            std::optional<Rational> eps_override) {
  Place const place = frame.pivot.place;
  std::size_t const n = frame.rep.rows();
  int const big_n = static_cast<int>(2 * n - 1);
  search::GeneralPositionWitness b1;
  try {
    b1 = search::find_general_position(sigma, frame.basis, big_n, cfg.search_len, frame.pivot.wedge);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoneFound) throw;
    throw Error(ErrorCode::GeneralPositionFails, std::string("B_1: ") + e.what());
  }
  if (!search::verify_general_position(b1, frame.basis)) {
    throw Error(ErrorCode::GeneralPositionFails, "B_1 witness does not replay");
  }
  QMatrix const b = rep_of(b1.element, frame.pivot.wedge);
  QMatrix const b_inv = exact::inverse(b);
  QMatrix const a1_inv = exact::inverse(a1.a1);
  Rational const eps2 = eps_override ? *eps_override : a1.cert.contraction.epsilon;
  LocalScalar const e2s = magnitude(place, eps2);
  ProjPoint const u1 = point(frame.top_vector, place);
  for (long e = 1; e <= cfg.exponent_cap; e *= 2) {
    Word const w = (a1.word.power(e) * b1.word * a1.word.power(-e)).reduced();
    check_length(w, cfg, "A_2 with e2 = " + std::to_string(e));
    QMatrix const p = exact::power(a1.a1, e);
    QMatrix const pi = exact::power(a1_inv, e);
    QMatrix a2 = p * b * pi;
    QMatrix const a2_inv = p * b_inv * pi;
    auto const cf = dynamics::cartan_candidate(a2, place);
    auto const cb = dynamics::cartan_candidate(a2_inv, place);
    if (!cf || !cb || cf->epsilon > eps2 || cb->epsilon > eps2) continue;
    auto f = try_contraction(a2, place, eps2, cf->attracting, cf->repelling, cfg.grid_cap);
    auto g = try_contraction(a2_inv, place, eps2, cb->attracting, cb->repelling, cfg.grid_cap);
    if (!f || !g) continue;
    Transcript prox;
    prox.push_back(dynamics::make_comparison("attracting(A_2) to u_1",
                                             projgeom::proj_dist(point(cf->attracting, place), u1), Relation::Le, e2s));
    prox.push_back(dynamics::make_comparison("attracting(A_2^-1) to u_1",
                                             projgeom::proj_dist(point(cb->attracting, place), u1), Relation::Le, e2s));
    if (!dynamics::all_true(prox)) continue;
    return VeryContractingStage{b1, e, std::move(a2), w, std::move(*f), std::move(*g), std::move(prox)};
  }
  throw Error(ErrorCode::ExponentCapExceeded, "A_2 not very contracting below the exponent cap");
}

// ---------------------------------------------------------------------------
// Step 3: very proximal X

VeryProximalStage build_very_proximal(const VeryContractingStage& a2, const SpectralFrame& frame,
                                      const Config& cfg) {
  Place const place = frame.pivot.place;
  std::size_t const n = frame.rep.rows();
  QMatrix const b = rep_of(a2.b1.element, frame.pivot.wedge);
  QMatrix const b_inv = exact::inverse(b);
  QMatrix const a2_inv = exact::inverse(a2.a2);
  std::string last = "no k tried";
  for (std::size_t k = 1; k <= 2 * n - 1; ++k) {
    Word const w = (a2.b1.word.power(static_cast<long>(k)) * a2.word).reduced();
    if (w.length() > cfg.max_word_len) {
      last = "word too long at k = " + std::to_string(k);
      break;
    }
    QMatrix const bk = exact::power(b, static_cast<long>(k));
    QMatrix const bk_inv = exact::power(b_inv, static_cast<long>(k));
    QMatrix x = bk * a2.a2;
    QMatrix const x_inv = a2_inv * bk_inv;
    QVector const vf = mul(bk, a2.forward.attracting);
    QVector const& hf = a2.forward.repelling;
    QVector const& vb = a2.backward.attracting;
    QVector const hb = push_form(bk_inv, a2.backward.repelling);
    Rational const r = std::min(dynamics::separation_lower_bound(place, vf, hf),
                                dynamics::separation_lower_bound(place, vb, hb));
    if (!(r > 0)) {
      last = "k = " + std::to_string(k) + ": attracting data not separated from repelling data";
      continue;
    }
    Rational const eps = eps_for(place, r);
    auto f = try_contraction(x, place, eps, vf, hf, cfg.grid_cap);
    auto g = f ? try_contraction(x_inv, place, eps, vb, hb, cfg.grid_cap) : std::nullopt;
    if (!f || !g) {
      last = "k = " + std::to_string(k) + ": contraction at eps = " + exact::to_string(eps) + " not certified";
      continue;
    }
    VeryProximalCert cert{dynamics::make_proximal(std::move(*f), r), dynamics::make_proximal(std::move(*g), r)};
    return VeryProximalStage{k, std::move(x), w, std::move(cert)};
  }
  throw Error(ErrorCode::PigeonholeFails, "no k <= " + std::to_string(2 * n - 1) + " certified (" + last + ")");
}

// ---------------------------------------------------------------------------
// Step 4: partner Y

PartnerStage build_partner(const VeryProximalStage& xs, const SpectralFrame& frame, const GenSet& sigma,
                           const Config& cfg) {
  Place const place = frame.pivot.place;
  std::size_t const wedge = frame.pivot.wedge;
  std::size_t const n = frame.rep.rows();
  if (!exact::is_semisimple(xs.x)) throw Error(ErrorCode::NotSemisimple, "X is not semisimple");
  auto const basis_x = search::integral_eigenvectors(xs.x);
  int const big_n = static_cast<int>((2 * n - 1) * (2 * n - 1));
  search::GeneralPositionWitness b2;
  try {
    b2 = search::find_general_position(sigma, basis_x, big_n, cfg.search_len, wedge);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoneFound) throw;
    throw Error(ErrorCode::GeneralPositionFails, std::string("B_2: ") + e.what());
  }
  QMatrix const c0 = rep_of(b2.element, wedge);
  QMatrix const c0_inv = exact::inverse(c0);
  QMatrix const x_inv = exact::inverse(xs.x);
  auto const& fx = xs.cert.forward.contraction;
  auto const& bx = xs.cert.backward.contraction;
  bool separated = false;
  for (std::size_t kp = 1; kp <= static_cast<std::size_t>(big_n); ++kp) {
    QMatrix const c = exact::power(c0, static_cast<long>(kp));
    QMatrix const ci = exact::power(c0_inv, static_cast<long>(kp));
    std::vector<QVector> const att{fx.attracting, bx.attracting, mul(c, fx.attracting), mul(c, bx.attracting)};
    std::vector<QVector> const rep{fx.repelling, bx.repelling, push_form(ci, fx.repelling),
                                   push_form(ci, bx.repelling)};
    Rational r(1);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        bool const same = (i < 2) == (j < 2);
        if (same && i != j) continue;
        r = std::min(r, dynamics::separation_lower_bound(place, att[i], rep[j]));
      }
    }
    if (!(r > 0)) continue;
    separated = true;
    Rational const eps = eps_for(place, r);
    Word const bw = b2.word.power(static_cast<long>(kp));
    for (long t = 1; t <= cfg.exponent_cap; t *= 2) {
      Word const wx = xs.word.power(t).reduced();
      Word const wy = (bw * xs.word.power(t) * bw.inverse()).reduced();
      check_length(wx, cfg, "X^" + std::to_string(t));
      check_length(wy, cfg, "Y with t = " + std::to_string(t));
      QMatrix const xt = exact::power(xs.x, t);
      QMatrix const xti = exact::power(x_inv, t);
      std::vector<QMatrix> const gs{xt, xti, c * xt * ci, c * xti * ci};
      std::vector<ProximalCert> prox;
      for (std::size_t i = 0; i < 4; ++i) {
        auto cc = try_contraction(gs[i], place, eps, att[i], rep[i], cfg.grid_cap);
        if (!cc) break;
        prox.push_back(dynamics::make_proximal(std::move(*cc), r));
      }
      if (prox.size() < 4) continue;
      VeryProximalCert const cx{prox[0], prox[1]};
      VeryProximalCert const cy{prox[2], prox[3]};
      auto cert = dynamics::verify_ping_pong(gs[0], gs[2], cx, cy, wx, wy);
      return PartnerStage{b2, kp, t, gs[2], wx, wy, std::move(cert)};
    }
    throw Error(ErrorCode::ExponentCapExceeded, "no power t of X and Y below the cap ping-pongs");
  }
  if (!separated) {
    throw Error(ErrorCode::PigeonholeFails,
                "no k' <= " + std::to_string(big_n) + " separates the conjugated data from X's data");
  }
  throw Error(ErrorCode::PigeonholeFails, "partner search exhausted");
}

// ---------------------------------------------------------------------------
// Direct scan

namespace {

struct ScanCandidate {
  Word word;
  QMatrix g;
  CartanCandidate fwd;
  CartanCandidate bwd;
  Rational eps;
  Rational self_r;
};

}  // namespace

std::optional<FreePairResult> direct_pair_scan(const GenSet& sigma, const Config& cfg,
                                               std::vector<std::string>* notes) {
  auto const ball = exact::enumerate_ball(sigma, std::max<std::size_t>(cfg.fallback_len, 1));
  std::size_t const d = sigma.dim();
  std::vector<long> const powers{1, 2, 4, 8, 16};
  std::size_t attempts = 0;
  for (std::size_t wedge = 1; wedge < d; ++wedge) {
    for (auto const& place : effective_places(sigma, cfg)) {
      std::size_t const slots = ball.elements.size() * powers.size();
      std::vector<std::optional<ScanCandidate>> cand(slots);
      parallel_for(slots, [&](std::size_t s) {
        auto const& el = ball.elements[s / powers.size()];
        long const pw = powers[s % powers.size()];
        Word w = el.word.power(pw).reduced();
        if (w.length() > cfg.max_word_len || w.empty()) return;
        if (!exact::is_semisimple(el.matrix) || exact::is_torsion(el.matrix)) return;
        QMatrix g = rep_of(exact::power(el.matrix, pw), wedge);
        try {
          auto f = dynamics::cartan_candidate(g, place);
          auto b = dynamics::cartan_candidate(exact::inverse(g), place);
          if (!f || !b) return;
          Rational const eps = std::max(f->epsilon, b->epsilon);
          Rational const sr = std::min(dynamics::separation_lower_bound(place, f->attracting, f->repelling),
                                       dynamics::separation_lower_bound(place, b->attracting, b->repelling));
          if (!(sr > 2 * eps)) return;
          cand[s] = ScanCandidate{std::move(w), std::move(g), std::move(*f), std::move(*b), eps, sr};
        } catch (const Error& e) {
          if (!contains_code(e, {ErrorCode::PrecisionExhausted})) throw;
        }
      });
      std::vector<ScanCandidate> cs;
      for (auto& c : cand) {
        if (c) cs.push_back(std::move(*c));
      }
      std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
          std::size_t const li = cs[i].word.length(), lj = cs[j].word.length();
          pairs.emplace_back(std::max(li, lj), li + lj, i, j);
        }
      }
      std::sort(pairs.begin(), pairs.end());
      for (auto const& [mx, sum, i, j] : pairs) {
        auto const& a = cs[i];
        auto const& b = cs[j];
        Rational const eps = std::max(a.eps, b.eps);
        Rational r = std::min(a.self_r, b.self_r);
        std::vector<QVector const*> const att{&a.fwd.attracting, &a.bwd.attracting, &b.fwd.attracting,
                                              &b.bwd.attracting};
        std::vector<QVector const*> const rep{&a.fwd.repelling, &a.bwd.repelling, &b.fwd.repelling,
                                              &b.bwd.repelling};
        for (std::size_t u = 0; u < 4 && r > 2 * eps; ++u) {
          for (std::size_t v = 0; v < 4 && r > 2 * eps; ++v) {
            if ((u < 2) == (v < 2)) continue;
            r = std::min(r, dynamics::separation_lower_bound(place, *att[u], *rep[v]));
          }
        }
        if (!(r > 2 * eps)) continue;
        ++attempts;
        try {
          auto cert = dynamics::ping_pong_from_cartan(a.g, b.g, place, a.word, b.word, cfg.grid_cap);
          FreePairResult res;
          res.word_x = a.word;
          res.word_y = b.word;
          res.wedge = wedge;
          res.method = "direct-scan";
          res.cert = std::move(cert);
          return res;
        } catch (const Error& e) {
          if (!contains_code(e, {ErrorCode::CriterionFails, ErrorCode::PreconditionViolated,
                                 ErrorCode::SeparationFails, ErrorCode::PrecisionExhausted,
                                 ErrorCode::VerificationFails})) {
            throw;
          }
        }
      }
      if (notes) {
        notes->push_back("direct scan at " + place.to_string() + " (wedge " + std::to_string(wedge) + "): " +
                         std::to_string(cs.size()) + " proximal candidates, " + std::to_string(pairs.size()) +
                         " pairs, none ping-pong");
      }
    }
  }
  if (notes) notes->push_back("direct scan exhausted after " + std::to_string(attempts) + " full attempts");
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Diagnoses and the end-to-end driver

std::vector<std::string> diagnose(const GenSet& sigma, const Config& cfg) {
  std::vector<std::string> out;
  std::size_t const len = std::max(cfg.search_len, cfg.fallback_len);
  auto const ball = exact::enumerate_ball(sigma, len);
  bool any_gap = false;
  auto const plc = effective_places(sigma, cfg);
  for (auto const& el : ball.elements) {
    for (auto const& place : plc) {
      if (best_gap(places::eigen_moduli(el.matrix, place))) {
        any_gap = true;
        break;
      }
    }
    if (any_gap) break;
  }
  if (!any_gap) {
    out.push_back("no modulus gap: no word of length <= " + std::to_string(len) +
                  " has eigenvalues of distinct absolute values at any place");
  }
  auto const& sz = ball.sizes;
  if (sz.size() >= 2 && sz[sz.size() - 1] == sz[sz.size() - 2]) {
    out.push_back("finite group of order " + std::to_string(sz.back()));
  }
  std::vector<QMatrix> gens;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i != sigma.identity_index() || !sigma.contains_identity()) gens.push_back(sigma[i]);
  }
  bool commute = true;
  for (std::size_t i = 0; i < gens.size() && commute; ++i) {
    for (std::size_t j = i + 1; j < gens.size() && commute; ++j) commute = gens[i] * gens[j] == gens[j] * gens[i];
  }
  if (commute) out.push_back("generators commute (abelian group)");
  if (!gens.empty()) {
    auto const common = exact::common_rational_eigenvectors(gens);
    for (auto const& v : common) {
      std::string s = "common fixed point [";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + exact::to_string(v[i]);
      out.push_back(s + "]: every candidate shares it, so no ping-pong pair exists");
    }
  }
  return out;
}

FreePairResult certify_free(const GenSet& sigma, const Config& cfg) {
  if (sigma.dim() < 2) throw Error(ErrorCode::PreconditionViolated, "dimension must be >= 2");
  PipelineTrace trace;
  std::optional<FreePairResult> result;
  std::string stage = "select_pivot";
  try {
    auto const sel = select_pivot(sigma, cfg.search_len, effective_places(sigma, cfg));
    stage = "build_spectral_frame";
    trace.frame = build_spectral_frame(sel, cfg);
    stage = "build_proximal";
    trace.proximal = build_proximal(*trace.frame, cfg);
    Rational eps2 = trace.proximal->cert.contraction.epsilon;
    for (int attempt = 0; attempt < 4 && !trace.very_proximal; ++attempt) {
      stage = "build_very_contracting";
      trace.very_contracting = build_very_contracting(*trace.proximal, *trace.frame, sigma, cfg, eps2);
      stage = "build_very_proximal";
      try {
        trace.very_proximal = build_very_proximal(*trace.very_contracting, *trace.frame, cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PigeonholeFails) throw;
        trace.notes.push_back(stage + ": " + e.what() + "; tightening A_2");
        eps2 /= 4;
      }
    }
    if (!trace.very_proximal) throw Error(ErrorCode::PigeonholeFails, "very proximal X not found");
    stage = "build_partner";
    trace.partner = build_partner(*trace.very_proximal, *trace.frame, sigma, cfg);
    FreePairResult r;
    r.word_x = trace.partner->word_x;
    r.word_y = trace.partner->word_y;
    r.wedge = trace.frame->pivot.wedge;
    r.method = "pipeline";
    r.cert = trace.partner->cert;
    result = std::move(r);
  } catch (const NotFoundError&) {
    throw;
  } catch (const Error& e) {
    trace.notes.push_back(stage + ": " + e.what());
  }
  if (!result) {
    // In dimension 2 a common rational eigenvector makes the group
    // triangularizable, hence solvable: no pair can ping-pong.
    bool triangular = false;
    if (sigma.dim() == 2) {
      triangular = !exact::common_rational_eigenvectors(sigma.generators()).empty();
      if (triangular) trace.notes.push_back("direct scan skipped: the group is triangularizable over Q");
    }
    if (!triangular) result = direct_pair_scan(sigma, cfg, &trace.notes);
  }
  if (!result) {
    auto diag = diagnose(sigma, cfg);
    diag.insert(diag.end(), trace.notes.begin(), trace.notes.end());
    throw NotFoundError(std::move(diag));
  }
  result->trace = std::move(trace);
  if (cfg.oracle_depth > 0) {
    QMatrix const x = exact::word_eval(sigma, result->word_x);
    QMatrix const y = exact::word_eval(sigma, result->word_y);
    auto const o = dynamics::free_word_oracle(x, y, cfg.oracle_depth);
    if (!o.free) {
      throw Error(ErrorCode::VerificationFails,
                  "certified pair satisfies the relation " + dynamics::oracle_word_string(o.failing_word));
    }
    result->oracle_depth = cfg.oracle_depth;
    result->oracle_words = o.words_checked;
  }
  return *result;
}

}  // namespace pingpong::construct
