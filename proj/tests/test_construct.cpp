#include <gtest/gtest.h>

#include <functional>

#include "pingpong/construct/construct.hpp"
#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/norms.hpp"

using namespace pingpong;
using namespace pingpong::construct;

namespace {

QMatrix m2(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  return QMatrix{{a, b}, {c, d}};
}

QMatrix const kS = m2(0, -1, 1, 0);
QMatrix const kT = m2(1, 1, 0, 1);
QMatrix const kU = m2(1, 0, 1, 1);
QMatrix const kB = m2(1, 1, 1, 2);
QMatrix diag(long t) { return m2(Rational(t), 0, 0, Rational(1, t)); }

GenSet gens(std::vector<SMatrix> g, std::vector<unsigned long> primes = {}) {
  return GenSet(std::move(g), exact::PrimeSupport(std::move(primes)), true);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

Config short_search(std::size_t len) {
  Config c;
  c.search_len = len;
  return c;
}

Place const kInf = Place::infinity();

void expect_sound(const GenSet& sigma, const FreePairResult& r) {
  QMatrix const x = exact::word_eval(sigma, r.word_x);
  QMatrix const y = exact::word_eval(sigma, r.word_y);
  EXPECT_EQ(r.cert.x, r.wedge == 1 ? x : exact::wedge_power(x, r.wedge));
  EXPECT_EQ(r.cert.y, r.wedge == 1 ? y : exact::wedge_power(y, r.wedge));
  EXPECT_TRUE(dynamics::all_true(r.cert.separations));
  EXPECT_GT(r.cert.r, 2 * r.cert.epsilon);
  EXPECT_TRUE(dynamics::free_word_oracle(x, y, 10).free);
}

}  // namespace

TEST(Pivot, DiagonalGenerator) {
  auto const sel = select_pivot(gens({diag(2)}, {2}), 1, {kInf, Place::prime(2)});
  EXPECT_TRUE(sel.a0 == diag(2) || sel.a0 == exact::inverse(diag(2)));
  EXPECT_EQ(sel.place, kInf);  // ties go to infinity
  EXPECT_EQ(sel.wedge, 1u);
  EXPECT_EQ(places::compare(sel.gap, LocalScalar::at_infinity(places::Interval(4L)), places::Relation::Ge),
            Verdict::True);
  EXPECT_EQ(sel.inequality, Verdict::True);
}

TEST(Pivot, ModularGroupPicksHyperbolicWord) {
  auto const sel = select_pivot(gens({kS, kT}), 4, {kInf});
  EXPECT_LE(sel.word.length(), 4u);
  EXPECT_GE(exact::abs(exact::trace(sel.a0)), 3);
  EXPECT_EQ(sel.place, kInf);
}

TEST(Pivot, FiniteGroupHasNoGap) {
  EXPECT_EQ(code_of([] { select_pivot(gens({kS}), 4, {kInf}); }), ErrorCode::NoGap);
}

TEST(Pivot, WedgeIndexInDimensionThree) {
  // Moduli 4, 4, 1/16: the only gap sits after two eigenvalues.
  QMatrix a(3, 3);
  a(0, 0) = 4;
  a(1, 1) = 4;
  a(2, 2) = Rational(1, 16);
  auto const sel = select_pivot(GenSet({a}, exact::PrimeSupport({2}), false), 1, {kInf});
  EXPECT_EQ(sel.a0, a);
  EXPECT_EQ(sel.wedge, 2u);
  EXPECT_EQ(sel.rep_dim, 3u);
}

TEST(Frame, DiagonalIsAlreadyDiagonal) {
  auto const sel = select_pivot(gens({diag(2)}, {2}), 1, {kInf});
  auto const fr = build_spectral_frame(sel, {});
  EXPECT_TRUE(fr.top_exact);
  ASSERT_TRUE(fr.diagonalizer.has_value());
  for (auto const& s : fr.separations) {
    EXPECT_EQ(places::compare(s, LocalScalar::at_infinity(places::Interval(1L)), places::Relation::Ge), Verdict::True);
  }
  QMatrix const conj = *fr.diagonalizer * fr.rep * exact::inverse(*fr.diagonalizer);
  EXPECT_EQ(conj(0, 1), 0);
  EXPECT_EQ(conj(1, 0), 0);
}

TEST(Frame, IrrationalEigenvectors) {
  auto const sel = select_pivot(gens({m2(2, 1, 1, 1)}), 1, {kInf});
  auto const fr = build_spectral_frame(sel, {});
  EXPECT_FALSE(fr.top_exact);
  EXPECT_EQ(places::compare(fr.separation, LocalScalar::zero(kInf), places::Relation::Gt), Verdict::True);
  // The approximate top vector is nearly fixed.
  EXPECT_EQ(places::compare(fr.residual, LocalScalar::at_infinity(places::Interval(Rational(1, 1000000))),
                            places::Relation::Le),
            Verdict::True);
  ASSERT_TRUE(fr.d_norm_sq.has_value());
}

TEST(Frame, PadicPivotWithIrrationalEigenvalue) {
  // x^2 - x/2 + 1: complex at infinity, roots of 2-adic size 2 and 1/2.
  QMatrix const a = m2(Rational(1, 2), 1, -1, 0);
  auto const sel = select_pivot(gens({a}, {2}), 1, {Place::prime(2)});
  auto const fr = build_spectral_frame(sel, {});
  EXPECT_EQ(fr.pivot.place, Place::prime(2));
  EXPECT_EQ(places::compare(fr.separation, LocalScalar::zero(Place::prime(2)), places::Relation::Gt), Verdict::True);
}

TEST(Proximal, DiagonalDoublingLandsOnTwo) {
  auto const sel = select_pivot(gens({diag(2)}, {2}), 1, {kInf});
  auto const fr = build_spectral_frame(sel, {});
  auto const st = build_proximal(fr, {});
  EXPECT_EQ(st.e1, 2);
  EXPECT_EQ(st.cert.contraction.epsilon, Rational(1, 4));
  EXPECT_EQ(st.word.length(), 2u);
}

TEST(Proximal, HyperbolicModularElement) {
  auto const sel = select_pivot(gens({m2(2, 1, 1, 1)}), 1, {kInf});
  auto const fr = build_spectral_frame(sel, {});
  auto const st = build_proximal(fr, {});
  EXPECT_LE(st.e1, 16);
  EXPECT_GT(st.cert.r, 2 * st.cert.contraction.epsilon);
}

TEST(Proximal, MonotoneUnderPowers) {
  auto const sel = select_pivot(gens({m2(2, 1, 1, 1)}), 1, {kInf});
  auto const fr = build_spectral_frame(sel, {});
  auto const st = build_proximal(fr, {});
  auto const& c = st.cert.contraction;
  for (long k = 2; k <= 8; k *= 2) {
    EXPECT_NO_THROW(dynamics::certify_contraction(exact::power(st.a1, k), kInf, c.epsilon, c.attracting, c.repelling));
  }
}

TEST(Proximal, WordBudgetStopsDoubling) {
  auto const sel = select_pivot(gens({m2(2, 1, 1, 1)}), 1, {kInf});
  auto const fr = build_spectral_frame(sel, {});
  Config cfg;
  cfg.max_word_len = 1;
  cfg.grid_cap = 0;
  EXPECT_EQ(code_of([&] { build_proximal(fr, cfg); }), ErrorCode::BudgetExceeded);
}

TEST(VeryContracting, RunningExample) {
  auto const sigma = gens({diag(256), kB}, {2});
  auto const cfg = short_search(1);
  auto const fr = build_spectral_frame(select_pivot(sigma, 1, {kInf}), cfg);
  auto const a1 = build_proximal(fr, cfg);
  auto const a2 = build_very_contracting(a1, fr, sigma, cfg);
  EXPECT_LE(a2.e2, 64);
  EXPECT_TRUE(dynamics::all_true(a2.proximity));
  EXPECT_EQ(exact::word_eval(sigma, a2.word), a2.a2);
}

TEST(VeryContracting, MonomialGroupFailsGeneralPosition) {
  auto const sigma = gens({diag(2), kS}, {2});
  auto const cfg = short_search(3);
  auto const fr = build_spectral_frame(select_pivot(sigma, 1, {kInf}), cfg);
  auto const a1 = build_proximal(fr, cfg);
  EXPECT_EQ(code_of([&] { build_very_contracting(a1, fr, sigma, cfg); }), ErrorCode::GeneralPositionFails);
}

TEST(VeryProximal, RunningExampleAndPartner) {
  auto const sigma = gens({diag(256), kB}, {2});
  auto cfg = short_search(1);
  cfg.max_word_len = 1000;
  auto const fr = build_spectral_frame(select_pivot(sigma, 1, {kInf}), cfg);
  auto const a1 = build_proximal(fr, cfg);
  auto const a2 = build_very_contracting(a1, fr, sigma, cfg);
  auto const x = build_very_proximal(a2, fr, cfg);
  EXPECT_LE(x.k, 3u);
  EXPECT_EQ(x.cert.forward.r, x.cert.backward.r);
  EXPECT_EQ(exact::word_eval(sigma, x.word), x.x);
  // Word accounting: X = B^k A_1^{e2} B A_1^{-e2}, before free reduction.
  std::size_t const raw = x.k * a2.b1.word.length() + 2 * static_cast<std::size_t>(a2.e2) * a1.word.length() +
                          a2.b1.word.length();
  EXPECT_LE(x.word.length(), raw);
  EXPECT_EQ(x.word.length() % 2, raw % 2);
  auto const y = build_partner(x, fr, sigma, cfg);
  EXPECT_LE(y.t, 64);
  EXPECT_TRUE(dynamics::all_true(y.cert.separations));
  EXPECT_TRUE(dynamics::free_word_oracle(y.cert.x, y.cert.y, 10).free);
}

TEST(CertifyFree, ModularGroup) {
  auto const sigma = gens({kS, kT});
  auto const r = certify_free(sigma);
  EXPECT_LE(r.word_x.length(), 50u);
  EXPECT_LE(r.word_y.length(), 50u);
  EXPECT_EQ(r.oracle_depth, 10);
  expect_sound(sigma, r);
}

TEST(CertifyFree, TwoUnipotents) {
  auto const sigma = gens({kT, kU});
  auto const r = certify_free(sigma);
  EXPECT_LE(std::max(r.word_x.length(), r.word_y.length()), 50u);
  expect_sound(sigma, r);
}

TEST(CertifyFree, DyadicExample) {
  auto const sigma = gens({diag(2), kB}, {2});
  auto const r = certify_free(sigma);
  EXPECT_LE(std::max(r.word_x.length(), r.word_y.length()), 50u);
  expect_sound(sigma, r);
}

TEST(CertifyFree, Deterministic) {
  auto const sigma = gens({kT, kU});
  auto const a = certify_free(sigma);
  auto const b = certify_free(sigma);
  EXPECT_EQ(a.word_x, b.word_x);
  EXPECT_EQ(a.word_y, b.word_y);
  EXPECT_EQ(a.cert.r, b.cert.r);
  EXPECT_EQ(a.cert.epsilon, b.cert.epsilon);
}

TEST(CertifyFree, DirectScanFallback) {
  auto const sigma = gens({kS, kT});
  auto const r = direct_pair_scan(sigma, {});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->method, "direct-scan");
  EXPECT_LE(std::max(r->word_x.length(), r->word_y.length()), 50u);
  expect_sound(sigma, *r);
}

TEST(CertifyFree, DimensionThree) {
  QMatrix a(3, 3), b(3, 3);
  for (std::size_t i = 0; i < 3; ++i) a(i, i) = b(i, i) = 1;
  a(0, 1) = 1;
  a(1, 2) = 1;
  b(1, 0) = 1;
  b(2, 1) = 1;
  auto const sigma = gens({a, b});
  Config cfg;
  cfg.oracle_depth = 6;
  auto const r = certify_free(sigma, cfg);
  QMatrix const x = exact::word_eval(sigma, r.word_x);
  QMatrix const y = exact::word_eval(sigma, r.word_y);
  EXPECT_TRUE(dynamics::all_true(r.cert.separations));
  EXPECT_TRUE(dynamics::free_word_oracle(x, y, 6).free);
}

namespace {

std::vector<std::string> diagnoses_of(const GenSet& sigma) {
  try {
    certify_free(sigma);
  } catch (const NotFoundError& e) {
    return e.diagnoses();
  }
  ADD_FAILURE() << "expected NotFound";
  return {};
}

bool mentions(const std::vector<std::string>& ds, const std::string& what) {
  for (auto const& d : ds) {
    if (d.find(what) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(NegativeControls, Abelian) {
  auto const ds = diagnoses_of(gens({kT}));
  EXPECT_TRUE(mentions(ds, "no modulus gap"));
}

TEST(NegativeControls, Finite) {
  auto const ds = diagnoses_of(gens({kS}));
  EXPECT_TRUE(mentions(ds, "no modulus gap"));
  EXPECT_TRUE(mentions(ds, "finite group of order 4"));
}

TEST(NegativeControls, Solvable) {
  auto const ds = diagnoses_of(gens({diag(2), kT}, {2}));
  EXPECT_TRUE(mentions(ds, "common fixed point [1, 0]"));
}

TEST(NegativeControls, DiagonalAbelianWithGap) {
  auto const ds = diagnoses_of(gens({diag(3), diag(5)}, {3, 5}));
  EXPECT_TRUE(mentions(ds, "generators commute"));
}
