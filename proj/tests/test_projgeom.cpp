#include <gtest/gtest.h>

#include <random>

#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/norms.hpp"
#include "pingpong/projgeom/cartan.hpp"
#include "pingpong/projgeom/projective.hpp"

using namespace pingpong;
using namespace pingpong::projgeom;
using places::Relation;
using places::Verdict;

namespace {

Place const kInf = Place::infinity();

ProjPoint pt(std::initializer_list<long> xs, Place v = kInf) {
  QVector q;
  for (long x : xs) q.emplace_back(x);
  return ProjPoint::from_rational(q, v);
}

ProjHyperplane hp(std::initializer_list<long> xs, Place v = kInf) {
  QVector q;
  for (long x : xs) q.emplace_back(x);
  return ProjHyperplane::from_rational(q, v);
}

QMatrix m2(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  return QMatrix{{a, b}, {c, d}};
}

bool encloses(const Interval& x, const Rational& lo, const Rational& hi) {
  return x.lo() <= hi && lo <= x.hi();
}

}  // namespace

TEST(ProjDist, Examples) {
  EXPECT_EQ(proj_dist(pt({1, 0}), pt({1, 0})).value.hi(), 0);
  EXPECT_EQ(proj_dist(pt({1, 0}), pt({0, 1})).value.lo(), 1);
  // 1/sqrt 2
  auto const d = proj_dist(pt({1, 0}), pt({1, 1}));
  EXPECT_EQ(proj_dist_sq(pt({1, 0}), pt({1, 1})).lo(), Rational(1, 2));
  EXPECT_TRUE(encloses(d.value, Rational(7071067, 10000000), Rational(7071068, 10000000)));
}

TEST(DistToHyperplane, Examples) {
  EXPECT_EQ(dist_to_hyperplane(pt({1, 0}), hp({1, 0})).value.lo(), 1);
  EXPECT_EQ(dist_to_hyperplane(pt({0, 1}), hp({1, 0})).value.hi(), 0);
  EXPECT_EQ(dist_to_hyperplane_sq(pt({1, 1}), hp({1, 0})).lo(), Rational(1, 2));
}

TEST(ProjDist, PadicExamples) {
  Place const p2 = Place::prime(2);
  EXPECT_EQ(*proj_dist(pt({1, 0}, p2), pt({0, 1}, p2)).log_p, 0);
  // (1, 0) vs (1, 4): minor 4, distance 2^-2.
  EXPECT_EQ(*proj_dist(pt({1, 0}, p2), pt({1, 4}, p2)).log_p, -2);
}

TEST(Cartan, Examples) {
  auto c = cartan(m2(2, 0, 0, Rational(1, 2)), kInf);
  EXPECT_EQ(c.a[0].value.lo(), 2);
  EXPECT_EQ(c.a[1].value.lo(), Rational(1, 2));
  c = cartan(m2(1, 1, 0, 1), Place::prime(3));
  EXPECT_EQ(*c.a[0].log_p, 0);
  EXPECT_EQ(*c.a[1].log_p, 0);
  c = cartan(m2(1, 1, 0, 1), kInf);
  // ((1 + sqrt 5)/2, (sqrt 5 - 1)/2)
  EXPECT_TRUE(encloses(c.a[0].value, Rational(1618033, 1000000), Rational(1618034, 1000000)));
  EXPECT_TRUE(encloses(c.a[1].value, Rational(618033, 1000000), Rational(618034, 1000000)));
}

TEST(Cartan, SmithFormReconstructs) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(-6, 6);
  for (unsigned long p : {2UL, 3UL, 5UL}) {
    for (int t = 0; t < 20; ++t) {
      QMatrix a(3, 3);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = Rational(v(rng), 1 + (t % 3 == 0 ? static_cast<long>(p) : 0));
      }
      for (auto& x : const_cast<std::vector<Rational>&>(a.data())) x.canonicalize();
      if (exact::det(a) == 0) continue;
      auto const s = smith_form(a, p);
      std::vector<Rational> diag;
      for (long j : s.exponents) diag.push_back(exact::power(Rational(static_cast<long>(p)), j));
      EXPECT_EQ(s.k * QMatrix::diagonal(diag) * s.k_prime, a);
      EXPECT_EQ(exact::valuation(exact::det(s.k), p), 0);
      EXPECT_EQ(exact::valuation(exact::det(s.k_prime), p), 0);
      for (auto const& x : s.k.data()) EXPECT_GE(exact::valuation(x, p), 0);
      for (auto const& x : s.k_prime.data()) EXPECT_GE(exact::valuation(x, p), 0);
      for (std::size_t i = 1; i < 3; ++i) EXPECT_LE(s.exponents[i - 1], s.exponents[i]);
    }
  }
}

TEST(Cartan, OrderingAndNormAgreement) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> v(-4, 4);
  for (int t = 0; t < 30; ++t) {
    QMatrix a = QMatrix::identity(3);
    for (int k = 0; k < 5; ++k) {
      QMatrix e = QMatrix::identity(3);
      e(k % 3, (k + 1) % 3) = v(rng);
      a = a * e;
    }
    for (Place pl : {kInf, Place::prime(2)}) {
      auto const c = cartan(a, pl);
      for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_EQ(places::compare(c.a[i], c.a[i - 1], Relation::Le), Verdict::True);
      }
      auto const n = places::op_norm(a, pl);
      EXPECT_TRUE(n.value.lo() <= c.a[0].value.hi() && c.a[0].value.lo() <= n.value.hi());
      auto prod = c.a[0] * c.a[1] * c.a[2];
      EXPECT_TRUE(prod.value.contains(Rational(1)));
    }
  }
}

TEST(Cartan, DirectionsAtInfinity) {
  // For symmetric positive diag(4, 1/4) the directions are e1 and e1*.
  auto const c = cartan(m2(4, 0, 0, Rational(1, 4)), kInf, true);
  ASSERT_TRUE(c.attracting && c.repelling);
  EXPECT_EQ(proj_dist(*c.attracting, pt({1, 0})).value.hi(), 0);
  auto const c2 = cartan(m2(2, 1, 1, 1), kInf, true);
  ASSERT_TRUE(c2.attracting);
  // Symmetric matrix: attracting point = top eigenvector, repelling = its orthogonal.
  EXPECT_LT(dist_to_hyperplane(*c2.attracting, *c2.repelling).value.lo(), Rational(1) + Rational(1, 1000));
  EXPECT_GT(dist_to_hyperplane(*c2.attracting, *c2.repelling).value.lo(), Rational(999, 1000));
}

TEST(Lipschitz, Examples) {
  EXPECT_EQ(lipschitz_bound(QMatrix::identity(2), kInf).value.lo(), 1);
  EXPECT_EQ(lipschitz_bound(m2(3, 0, 0, Rational(1, 3)), kInf).value.lo(), 81);
  EXPECT_EQ(*lipschitz_bound(m2(1, 1, 0, 1), Place::prime(2)).log_p, 0);
}

TEST(Properties, PadicUnimodularIsometry) {
  Place const p3 = Place::prime(3);
  QMatrix const u = m2(1, 1, 3, 4);  // det 1, integral
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> v(-30, 30);
  for (int t = 0; t < 50; ++t) {
    QVector a{Rational(v(rng)), Rational(v(rng))}, b{Rational(v(rng)), Rational(v(rng))};
    if ((a[0] == 0 && a[1] == 0) || (b[0] == 0 && b[1] == 0)) continue;
    auto const x = ProjPoint::from_rational(a, p3), y = ProjPoint::from_rational(b, p3);
    auto const d0 = proj_dist(x, y), d1 = proj_dist(apply(u, x), apply(u, y));
    EXPECT_EQ(d0.log_p.has_value(), d1.log_p.has_value());
    if (d0.log_p) {
      EXPECT_EQ(*d0.log_p, *d1.log_p);
    }
  }
}

TEST(Properties, HyperplaneDistanceBelowPointDistance) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> v(-9, 9);
  for (int t = 0; t < 40; ++t) {
    QVector f{Rational(v(rng)), Rational(v(rng)), Rational(v(rng))};
    QVector x{Rational(v(rng)), Rational(v(rng)), Rational(v(rng))};
    if (f == QVector(3, Rational(0)) || x == QVector(3, Rational(0))) continue;
    for (Place pl : {kInf, Place::prime(3)}) {
      auto const h = ProjHyperplane::from_rational(f, pl);
      auto const p = ProjPoint::from_rational(x, pl);
      // Points q on the hyperplane: cross products of f with random vectors.
      for (int s = 0; s < 5; ++s) {
        QVector r{Rational(v(rng)), Rational(v(rng)), Rational(v(rng))};
        QVector q{f[1] * r[2] - f[2] * r[1], f[2] * r[0] - f[0] * r[2], f[0] * r[1] - f[1] * r[0]};
        if (q == QVector(3, Rational(0))) continue;
        auto const qp = ProjPoint::from_rational(q, pl);
        EXPECT_NE(places::compare(dist_to_hyperplane(p, h), proj_dist(p, qp), Relation::Le), Verdict::False);
      }
    }
  }
}
