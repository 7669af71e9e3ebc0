#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/parallel.hpp"
#include "pingpong/search/search.hpp"

using namespace pingpong;
using namespace pingpong::search;

namespace {

QMatrix m2(long a, long b, long c, long d) {
  return QMatrix{{Rational(a), Rational(b)}, {Rational(c), Rational(d)}};
}

QMatrix const kS = m2(0, -1, 1, 0);
QMatrix const kT = m2(1, 1, 0, 1);

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

QVector vec(std::initializer_list<long> xs) {
  QVector q;
  for (long x : xs) q.emplace_back(x);
  return q;
}

}  // namespace

TEST(NonTorsion, ModularGroupHitsAParabolicAtLengthOne) {
  auto const f = find_non_torsion(gens({kS, kT}), 3);
  EXPECT_EQ(f.word.length(), 1u);
  EXPECT_TRUE(f.matrix == kT || f.matrix == exact::inverse(kT));
}

TEST(NonTorsion, FiniteGroupsGiveNoneFound) {
  QMatrix const minus = m2(-1, 0, 0, -1);
  EXPECT_EQ(code_of([&] { find_non_torsion(gens({minus}), 4); }), ErrorCode::NoneFound);
  EXPECT_EQ(code_of([&] { find_non_torsion(gens({kS}), 6); }), ErrorCode::NoneFound);
}

TEST(Semisimple, ModularGroupHasShortHyperbolicWord) {
  auto const f = find_semisimple_nontorsion(gens({kS, kT}), 4);
  EXPECT_LE(f.word.length(), 4u);
  EXPECT_GE(exact::abs(exact::trace(f.matrix)), 3);
  EXPECT_EQ(exact::word_eval(gens({kS, kT}), f.word), f.matrix);
}

TEST(Semisimple, UnipotentGroupGivesNoneFound) {
  EXPECT_EQ(code_of([&] { find_semisimple_nontorsion(gens({kT}), 5); }), ErrorCode::NoneFound);
}

TEST(Semisimple, DiagonalHitsAtLengthOne) {
  QMatrix const d = QMatrix{{Rational(2), Rational(0)}, {Rational(0), Rational(1, 2)}};
  auto const f = find_semisimple_nontorsion(gens({d}, {2}), 3, true);
  EXPECT_EQ(f.word.length(), 1u);
}

TEST(Semisimple, DeterministicAcrossThreadCounts) {
  auto const sigma = gens({kS, kT});
  set_thread_count(1);
  auto const a = find_semisimple_nontorsion(sigma, 5, true);
  set_thread_count(4);
  auto const b = find_semisimple_nontorsion(sigma, 5, true);
  set_thread_count(0);
  EXPECT_EQ(a.word, b.word);
}

TEST(Eigenvectors, DiagonalGivesCoordinateAxes) {
  QMatrix const d = QMatrix{{Rational(2), Rational(0)}, {Rational(0), Rational(1, 2)}};
  auto const basis = integral_eigenvectors(d);
  auto const vs = basis.vectors();
  ASSERT_EQ(vs.size(), 2u);
  std::vector<QVector> found;
  for (auto const& v : vs) {
    ASSERT_EQ(v.modulus.degree(), 1);
    EXPECT_TRUE(is_eigenvector(d, v));
    Rational const root = -v.modulus.coefficient(0) / v.modulus.leading();
    found.push_back(v.at(root));
  }
  int axes = 0;
  for (auto const& q : found) {
    if (q[1] == 0 && q[0] != 0) axes |= 1;
    if (q[0] == 0 && q[1] != 0) axes |= 2;
  }
  EXPECT_EQ(axes, 3);
}

TEST(Eigenvectors, IrrationalEigenvaluesStayExact) {
  QMatrix const a = m2(2, 1, 1, 1);
  auto const basis = integral_eigenvectors(a);
  auto const vs = basis.vectors();
  ASSERT_EQ(vs.size(), 1u);
  auto const& v = vs[0];
  EXPECT_EQ(v.modulus, (QPoly{Rational(1), Rational(-3), Rational(1)}));
  EXPECT_TRUE(is_eigenvector(a, v));
  // v_2 = (x - 2) v_1 modulo f.
  QPoly const lhs = v.coords[1];
  QPoly const rhs = (v.coords[0] * (QPoly::x() - QPoly::constant(Rational(2)))) % v.modulus;
  EXPECT_EQ(lhs % v.modulus, rhs);
}

TEST(Eigenvectors, IdentityGivesFullBasis) {
  auto const basis = integral_eigenvectors(QMatrix::identity(3));
  auto const vs = basis.vectors();
  ASSERT_EQ(vs.size(), 3u);
  QMatrix m(3, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    auto const q = vs[j].at(Rational(1));
    for (std::size_t i = 0; i < 3; ++i) m(i, j) = q[i];
  }
  EXPECT_NE(exact::det(m), 0);
}

TEST(Eigenvectors, NilpotentPartIsRejected) {
  EXPECT_EQ(code_of([] { integral_eigenvectors(kT); }), ErrorCode::NotSemisimple);
}

TEST(Eigenvectors, DualsPairOnlyWithTheirOwnVector) {
  // Random semisimple integer matrices; the dual pairing must be diagonal.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> dist(-4, 4);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 15; ++trial) {
    QMatrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) a(i, j) = dist(rng);
    }
    if (!exact::is_semisimple(a)) continue;
    auto const basis = integral_eigenvectors(a);
    for (auto const& p : basis.pieces) {
      for (auto const& v : p.right) EXPECT_TRUE(is_eigenvector(a, v));
      for (std::size_t s = 0; s < p.right.size(); ++s) {
        for (std::size_t t = 0; t < p.right.size(); ++t) {
          QPoly acc;
          for (std::size_t i = 0; i < 3; ++i) acc += p.dual[s].coords[i] * p.right[t].coords[i];
          acc = acc % p.modulus;
          EXPECT_EQ(acc.is_zero(), s != t);
        }
      }
    }
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(Eigenvectors, NormBoundDominatesRationalEvaluation) {
  QMatrix const d = QMatrix{{Rational(4), Rational(0)}, {Rational(0), Rational(1, 4)}};
  auto const basis = integral_eigenvectors(d);
  for (auto const& v : basis.vectors()) {
    auto const b = norm_bound(v, Place::infinity());
    Rational const root = -v.modulus.coefficient(0) / v.modulus.leading();
    for (auto const& c : v.at(root)) {
      EXPECT_EQ(places::compare(places::LocalScalar::at_infinity(places::Interval(abs(c))), b, places::Relation::Le),
                places::Verdict::True);
    }
  }
}

TEST(GeneralPosition, StandardBasisWithHyperbolicElement) {
  auto const basis = Eigenbasis::from_rational({vec({1, 0}), vec({0, 1})});
  auto const recs = general_position_records(m2(1, 1, 1, 2), basis, 3);
  ASSERT_TRUE(recs.has_value());
  auto const w = find_general_position(gens({m2(1, 1, 1, 2)}), basis, 3, 2);
  EXPECT_EQ(w.word.length(), 1u);
  EXPECT_TRUE(verify_general_position(w, basis));
}

TEST(GeneralPosition, PermutationsNeverQualify) {
  auto const basis = Eigenbasis::from_rational({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})});
  QMatrix p(3, 3);
  p(0, 1) = 1;
  p(1, 2) = 1;
  p(2, 0) = 1;
  QMatrix sw(3, 3);
  sw(0, 1) = 1;
  sw(1, 0) = -1;
  sw(2, 2) = 1;
  std::string why;
  EXPECT_FALSE(general_position_records(p, basis, 3, &why).has_value());
  EXPECT_FALSE(why.empty());
  EXPECT_EQ(code_of([&] { find_general_position(gens({p, sw}), basis, 3, 4); }), ErrorCode::NoneFound);
}

TEST(GeneralPosition, IrrationalEigenbasisWithModularGenerators) {
  auto const basis = integral_eigenvectors(m2(2, 1, 1, 1));
  auto const w = find_general_position(gens({kS, kT}), basis, 3, 3);
  EXPECT_LE(w.word.length(), 3u);
  EXPECT_TRUE(verify_general_position(w, basis));
  // A tampered record no longer replays.
  auto bad = w;
  bad.determinants.front().evidence += "0";
  EXPECT_FALSE(verify_general_position(bad, basis));
}

TEST(GeneralPosition, DegenerateBasisIsRejected) {
  EXPECT_EQ(code_of([] { Eigenbasis::from_rational({vec({1, 2}), vec({2, 4})}); }), ErrorCode::PreconditionViolated);
}

TEST(GeneralPosition, WedgeRepresentation) {
  // Second exterior power of SL_3 acts on a 3-dimensional space.
  auto const basis = Eigenbasis::from_rational({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})});
  QMatrix u(3, 3), l(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    u(i, i) = 1;
    l(i, i) = 1;
  }
  u(0, 1) = 1;
  u(1, 2) = 1;
  l(1, 0) = 1;
  l(2, 1) = 1;
  auto const w = find_general_position(gens({u, l}), basis, 3, 6, 2);
  EXPECT_EQ(w.wedge, 2u);
  EXPECT_TRUE(verify_general_position(w, basis));
}
