#include <gtest/gtest.h>

#include <random>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/interval.hpp"
#include "pingpong/places/norms.hpp"
#include "pingpong/places/padic.hpp"
#include "pingpong/places/place.hpp"
#include "pingpong/places/roots.hpp"

using namespace pingpong;
using namespace pingpong::places;
using exact::QMatrix;
using exact::QPoly;

namespace {

QMatrix m2(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  return QMatrix{{a, b}, {c, d}};
}

Interval golden_plus() {  // (3 + sqrt 5) / 2
  return (Interval(3L) + sqrt(Interval(5L))) / Interval(2L);
}

QMatrix random_sl2(std::mt19937_64& rng, bool half) {
  std::uniform_int_distribution<int> v(-3, 3);
  QMatrix m = QMatrix::identity(2);
  for (int k = 0; k < 4; ++k) {
    QMatrix u = QMatrix::identity(2);
    u(k % 2, 1 - k % 2) = v(rng);
    m = m * u;
  }
  if (half) m = m * m2(Rational(2), 0, 0, Rational(1, 2));
  return m;
}

}  // namespace

TEST(Interval, ArithmeticEncloses) {
  Interval const s2 = sqrt(Interval(2L));
  EXPECT_TRUE((s2 * s2).contains(Rational(2)));
  EXPECT_TRUE(sqrt(Interval(Rational(9, 4))).is_point());
  EXPECT_EQ(sqrt(Interval(Rational(9, 4))).lo(), Rational(3, 2));
  Interval const e = exp(Interval(1L));
  EXPECT_TRUE(log(e).contains(Rational(1)));
  EXPECT_THROW(Interval(1L) / Interval(Rational(-1), Rational(1)), Error);
}

TEST(Interval, OutwardRoundingKeepsContainment) {
  PrecisionScope scope(32);
  Interval x(Rational(1, 3));
  Rational exact_value(1, 3);
  for (int k = 0; k < 30; ++k) {
    x = x * Interval(Rational(7, 5)) + Interval(Rational(1, 11));
    exact_value = exact_value * Rational(7, 5) + Rational(1, 11);
  }
  EXPECT_TRUE(x.contains(exact_value));
  EXPECT_FALSE(x.is_point());
}

TEST(AbsAt, Examples) {
  auto a = abs_at(Rational(1, 2), Place::prime(2));
  EXPECT_EQ(*a.log_p, 1);
  EXPECT_EQ(a.value.lo(), 2);
  a = abs_at(Rational(6), Place::prime(3));
  EXPECT_EQ(a.value.lo(), Rational(1, 3));
  a = abs_at(Rational(-3), Place::infinity());
  EXPECT_EQ(a.value.lo(), 3);
}

TEST(AbsAt, ProductFormula) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long> v(1, 5000);
  for (int t = 0; t < 200; ++t) {
    Rational x(v(rng), v(rng));
    x.canonicalize();
    if (t % 2) x = -x;
    Interval prod = abs_at(x, Place::infinity()).value;
    for (unsigned long p = 2; p <= 5000; ++p) {
      if (!exact::is_prime(p)) continue;
      if (exact::valuation(x, p) == 0) continue;
      prod = prod * abs_at(x, Place::prime(p)).value;
    }
    EXPECT_TRUE(prod.is_point());
    EXPECT_EQ(prod.lo(), 1);
  }
}

TEST(Compare, Examples) {
  auto ball = [](Rational c, Rational r) { return LocalScalar::at_infinity(Interval(c - r, c + r)); };
  EXPECT_EQ(compare(ball(1, Rational(1, 10)), ball(2, Rational(1, 10)), Relation::Lt), Verdict::True);
  EXPECT_EQ(compare(ball(1, Rational(6, 10)), ball(2, Rational(6, 10)), Relation::Lt), Verdict::Undecided);
  EXPECT_EQ(compare(LocalScalar::p_power(3, -1), LocalScalar::p_power(3, 0), Relation::Lt), Verdict::True);
  EXPECT_EQ(compare(ball(1, 0), ball(1, 0), Relation::Le), Verdict::True);
}

TEST(PAdic, BallArithmetic) {
  PAdic a(5, Rational(7), 4);  // 7 + O(5^4)
  PAdic b(5, Rational(1, 5));
  PAdic c = a * b;
  EXPECT_EQ(*c.precision(), 3);
  EXPECT_EQ(*c.valuation(), -1);
  PAdic z(5, Rational(0), 3);
  EXPECT_FALSE(z.valuation().has_value());
  EXPECT_THROW(a / z, Error);
  EXPECT_EQ(truncate_padic(Rational(-1), 2, 3), Rational(7));
}

TEST(Roots, SturmIsolation) {
  // (x - 1)(x - 2)^2 (x^2 - 2)
  QPoly const p = QPoly{-1, 1} * QPoly{-2, 1} * QPoly{-2, 1} * QPoly{-2, 0, 1};
  auto const r = real_roots(p, Rational(1, 1 << 20));
  ASSERT_EQ(r.size(), 4u);
  EXPECT_TRUE(r[0].enclosure.contains(Rational(-1414214, 1000000)) || r[0].enclosure.hi() < -1);
  EXPECT_TRUE(r[1].enclosure.is_point());
  EXPECT_EQ(r[1].enclosure.lo(), 1);
  EXPECT_EQ(r[3].enclosure.lo(), 2);
  EXPECT_EQ(r[3].multiplicity, 2);
}

TEST(Roots, SchurCohnMatchesKnownModuli) {
  // (x^2 + 4)(x - 1/3)(x + 5): moduli 5, 2, 2, 1/3
  QPoly const p = QPoly{4, 0, 1} * QPoly{Rational(-1, 3), 1} * QPoly{5, 1};
  EXPECT_EQ(*count_in_disk(p, Rational(3)), 3);
  EXPECT_EQ(*count_in_disk(p, Rational(1)), 1);
  EXPECT_FALSE(count_in_disk(p, Rational(2)).has_value());
  auto const cl = root_moduli(p, 40);
  ASSERT_EQ(cl.size(), 3u);
  EXPECT_TRUE(cl[0].modulus.contains(Rational(5)));
  EXPECT_EQ(cl[1].count, 2);
  EXPECT_TRUE(cl[1].modulus.contains(Rational(2)));
  EXPECT_TRUE(cl[2].modulus.contains(Rational(1, 3)));
}

TEST(Roots, NewtonPolygonMatchesSplitRoots) {
  for (unsigned long p : {2UL, 3UL, 5UL}) {
    QPoly f{1};
    std::vector<long> ks{-2, 0, 0, 1, 3};
    for (long k : ks) f = f * QPoly::linear(exact::power(Rational(static_cast<long>(p)), k) * 7);
    auto const np = newton_polygon(f, p);
    std::vector<Rational> got;
    for (auto const& s : np.segments) {
      for (int i = 0; i < s.multiplicity; ++i) got.push_back(s.exponent);
    }
    std::vector<Rational> want{2, 0, 0, -1, -3};
    EXPECT_EQ(got, want);
  }
}

TEST(OpNorm, Examples) {
  EXPECT_EQ(op_norm(QMatrix::identity(2), Place::infinity()).value.lo(), 1);
  EXPECT_EQ(*op_norm(QMatrix::identity(2), Place::prime(2)).log_p, 0);
  auto n = op_norm(m2(2, 0, 0, Rational(1, 2)), Place::infinity());
  EXPECT_TRUE(n.value.is_point());
  EXPECT_EQ(n.value.lo(), 2);
  n = op_norm(m2(1, 1, 0, 1), Place::infinity());
  Interval const phi = (Interval(1L) + sqrt(Interval(5L))) / Interval(2L);
  EXPECT_TRUE(n.value.contains(Interval(phi.hi(), phi.hi())) || n.value.contains(phi.lo()));
  EXPECT_LT(n.value.width(), Rational(1, 1000000));
}

TEST(MaxEig, Examples) {
  auto l = max_eig_abs(m2(2, 0, 0, Rational(1, 2)), Place::infinity());
  EXPECT_TRUE(l.value.contains(Rational(2)));
  l = max_eig_abs(m2(1, 1, 0, 1), Place::prime(2));
  EXPECT_EQ(*l.log_p, 0);
  l = max_eig_abs(m2(2, 1, 1, 1), Place::infinity());
  Interval const g = golden_plus();
  EXPECT_TRUE(l.value.lo() < g.hi() && g.lo() < l.value.hi());
  EXPECT_LT(l.value.width(), Rational(1, 1000000));
}

TEST(LambdaGlobal, Examples) {
  exact::PrimeSupport const s({2});
  auto g = lambda_global(QMatrix::identity(2), s);
  EXPECT_TRUE(g.value.contains(Rational(1)));
  g = lambda_global(m2(2, 0, 0, Rational(1, 2)), s);
  EXPECT_TRUE(g.value.contains(Rational(2)));
  EXPECT_TRUE(g.place.is_infinite());
  EXPECT_EQ(*g.per_place[1].log_p, 1);
  g = lambda_global(m2(2, 1, 1, 1), s);
  EXPECT_TRUE(g.place.is_infinite());
  EXPECT_EQ(*g.per_place[1].log_p, 0);
}

TEST(Properties, SubmultiplicativeAndSpectralBound) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    QMatrix const a = random_sl2(rng, t % 2 == 0), b = random_sl2(rng, t % 3 == 0);
    for (Place v : {Place::infinity(), Place::prime(2)}) {
      auto const nab = op_norm(a * b, v);
      auto const prod = op_norm(a, v) * op_norm(b, v);
      EXPECT_EQ(compare(nab, prod, Relation::Le), Verdict::True);
      EXPECT_NE(compare(max_eig_abs(a, v), op_norm(a, v), Relation::Le), Verdict::False);
    }
  }
}

TEST(Properties, SpectralPowerIdentity) {
  std::mt19937_64 rng(23);
  int checked = 0;
  while (checked < 20) {
    QMatrix const a = random_sl2(rng, checked % 2 == 0);
    if (!exact::is_semisimple(a)) continue;
    for (Place v : {Place::infinity(), Place::prime(2)}) {
      auto const l1 = max_eig_abs(a, v);
      auto const l3 = max_eig_abs(exact::power(a, 3), v);
      auto const cube = pow(l1, 3);
      if (v.is_infinite()) {
        EXPECT_TRUE(l3.value.lo() <= cube.value.hi() && cube.value.lo() <= l3.value.hi());
      } else {
        EXPECT_EQ(*l3.log_p, *cube.log_p);
      }
    }
    ++checked;
  }
}
