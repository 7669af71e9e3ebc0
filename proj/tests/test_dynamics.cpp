#include <gtest/gtest.h>

#include <random>

#include "pingpong/dynamics/certs.hpp"
#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/norms.hpp"

using namespace pingpong;
using namespace pingpong::dynamics;

namespace {

Place const kInf = Place::infinity();

QMatrix m2(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  return QMatrix{{a, b}, {c, d}};
}

QMatrix diag2(long t) { return m2(Rational(t), 0, 0, Rational(1, t)); }

QVector vec(std::initializer_list<long> xs) {
  QVector q;
  for (long x : xs) q.emplace_back(x);
  return q;
}

bool proportional(const QVector& a, const QVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a[i] * b[j] != a[j] * b[i]) return false;
    }
  }
  return true;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST(Contraction, CartanBoundaryCaseAtInfinity) {
  auto const c = contraction_from_cartan(diag2(100), kInf, Rational(1, 100));
  EXPECT_EQ(c.method, Method::CartanCriterion);
  EXPECT_TRUE(proportional(c.attracting, vec({1, 0})));
  // Hyperplane span(e_2), the kernel of e_1^*.
  EXPECT_TRUE(proportional(c.repelling, vec({1, 0})));
  EXPECT_TRUE(all_true(c.transcript));
}

TEST(Contraction, IdentityFailsCriterion) {
  EXPECT_EQ(code_of([] { contraction_from_cartan(QMatrix::identity(2), kInf, Rational(1, 2)); }),
            ErrorCode::CriterionFails);
}

TEST(Contraction, PadicBoundaryCase) {
  for (long p : {2L, 3L, 5L}) {
    Rational const pp(p);
    QMatrix a = QMatrix::diagonal({pp * pp, Rational(1), 1 / (pp * pp)});
    auto const c = contraction_from_cartan(a, Place::prime(static_cast<unsigned long>(p)), 1 / pp);
    EXPECT_TRUE(all_true(c.transcript));
    // |p^2|_p is the smallest entry, so e_3 is attracting.
    EXPECT_TRUE(proportional(c.attracting, vec({0, 0, 1})));
  }
}

TEST(Contraction, PadicCriterionRejectsTooSmallEps) {
  QMatrix a = QMatrix::diagonal({Rational(4), Rational(1), Rational(1, 4)});
  EXPECT_EQ(code_of([&] { contraction_from_cartan(a, Place::prime(2), Rational(1, 4)); }),
            ErrorCode::CriterionFails);
}

TEST(Contraction, CandidateEpsilonCloses) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> ent(-4, 4);
  int tested = 0;
  while (tested < 20) {
    long a = ent(rng), b = ent(rng), c = ent(rng);
    if (a == 0) continue;
    // [[a, b], [c, (1 + b c)/a]] has determinant 1.
    QMatrix g = m2(Rational(a), Rational(b), Rational(c), exact::make_rational(1 + b * c, a));
    auto const cand = cartan_candidate(g, kInf);
    if (!cand) continue;
    auto const cert = certify_contraction(g, kInf, cand->epsilon, cand->attracting, cand->repelling);
    EXPECT_TRUE(all_true(cert.transcript));
    ++tested;
  }
}

TEST(Grid, DiagonalVerified) {
  auto const c = verify_contracting(diag2(10), kInf, Rational(1, 10), vec({1, 0}), vec({1, 0}));
  EXPECT_EQ(c.method, Method::GridVerified);
  EXPECT_GT(c.grid_cells, 0u);
}

TEST(Grid, IdentityHasWitness) {
  EXPECT_EQ(code_of([] {
              verify_contracting(QMatrix::identity(2), kInf, Rational(1, 2), vec({1, 0}), vec({1, 0}));
            }),
            ErrorCode::VerificationFails);
}

TEST(Grid, RotationHasWitness) {
  QMatrix const rot = m2(0, -1, 1, 0);
  for (Rational eps : {Rational(1, 4), Rational(2, 5), Rational(1, 10)}) {
    EXPECT_EQ(code_of([&] { verify_contracting(rot, kInf, eps, vec({1, 0}), vec({1, 0})); }),
              ErrorCode::VerificationFails);
  }
}

TEST(Grid, PadicDiagonal) {
  QMatrix a = QMatrix::diagonal({Rational(1, 4), Rational(4)});
  // At 2 the first coordinate is expanded by |1/4|_2 = 4.
  auto const c = verify_contracting(a, Place::prime(2), Rational(1, 4), vec({1, 0}), vec({1, 0}));
  EXPECT_GT(c.grid_cells, 0u);
  EXPECT_EQ(code_of([&] {
              verify_contracting(a, Place::prime(2), Rational(1, 4), vec({0, 1}), vec({0, 1}));
            }),
            ErrorCode::VerificationFails);
}

TEST(Grid, CapGivesPrecisionExhausted) {
  EXPECT_EQ(code_of([] { verify_contracting(diag2(10), kInf, Rational(1, 10), vec({1, 0}), vec({1, 0}), 4); }),
            ErrorCode::PrecisionExhausted);
}

TEST(Grid, ThreeDimensional) {
  QMatrix a = QMatrix::diagonal({Rational(20), Rational(1), Rational(1, 20)});
  auto const c = verify_contracting(a, kInf, Rational(1, 2), vec({1, 0, 0}), vec({1, 0, 0}));
  EXPECT_GT(c.grid_cells, 0u);
}

// Verified eps-contraction forces a_2/a_1 <= eps/2 on these examples.
TEST(Grid, VerifiedEpsilonBoundsCartanRatio) {
  for (long t : {4L, 10L, 30L}) {
    for (Rational eps : {Rational(1, 2), Rational(1, 5), Rational(1, 10)}) {
      try {
        verify_contracting(diag2(t), kInf, eps, vec({1, 0}), vec({1, 0}));
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::VerificationFails);
        continue;
      }
      Rational const ratio(1, t * t);
      EXPECT_LE(ratio, eps / 2) << t << " " << eps;
    }
  }
}

namespace {

QMatrix conj(const QMatrix& g, const QMatrix& x) { return g * x * exact::inverse(g); }

}  // namespace

TEST(PingPong, ConjugateDiagonalPair) {
  QMatrix const x = diag2(25);
  QMatrix const y = conj(m2(1, 1, 1, 2), x);
  auto const cert = ping_pong_from_cartan(x, y, kInf);
  EXPECT_EQ(cert.separations.size(), 8u);
  EXPECT_TRUE(all_true(cert.separations));
  EXPECT_GT(cert.r, 2 * cert.epsilon);
  EXPECT_TRUE(free_word_oracle(x, y, 8).free);
}

TEST(PingPong, SameElementFailsSeparation) {
  QMatrix const x = diag2(25);
  auto const cert = ping_pong_from_cartan(x, conj(m2(1, 1, 1, 2), x), kInf);
  EXPECT_EQ(code_of([&] { verify_ping_pong(x, x, cert.cert_x, cert.cert_x); }), ErrorCode::SeparationFails);
}

TEST(PingPong, RejectsSmallR) {
  QMatrix const x = diag2(25);
  auto cert = ping_pong_from_cartan(x, conj(m2(1, 1, 1, 2), x), kInf);
  VeryProximalCert cx = cert.cert_x, cy = cert.cert_y;
  for (auto* p : {&cx.forward, &cx.backward, &cy.forward, &cy.backward}) p->r = 2 * p->contraction.epsilon;
  EXPECT_EQ(code_of([&] { verify_ping_pong(x, cert.y, cx, cy); }), ErrorCode::PreconditionViolated);
  EXPECT_EQ(code_of([&] { make_proximal(cert.cert_x.forward.contraction, 2 * cert.epsilon); }),
            ErrorCode::PreconditionViolated);
}

TEST(PingPong, PadicPair) {
  // Over Z[1/2] at the place 2.
  QMatrix const x = QMatrix::diagonal({Rational(1, 16), Rational(16)});
  QMatrix const y = conj(m2(1, 1, 1, 2), x);
  auto const cert = ping_pong_from_cartan(x, y, Place::prime(2));
  EXPECT_TRUE(all_true(cert.separations));
  EXPECT_TRUE(free_word_oracle(x, y, 8).free);
}

TEST(PingPong, InverseSymmetry) {
  QMatrix const x = diag2(25);
  QMatrix const y = conj(m2(1, 1, 1, 2), x);
  auto const cert = ping_pong_from_cartan(x, y, kInf);
  // Swapping forward and backward certifies the inverses.
  VeryProximalCert const sx{cert.cert_x.backward, cert.cert_x.forward};
  VeryProximalCert const sy{cert.cert_y.backward, cert.cert_y.forward};
  QMatrix const xi = exact::inverse(x), yi = exact::inverse(y);
  auto check = [&](const QMatrix& g, const ProximalCert& p) {
    auto const& c = p.contraction;
    EXPECT_TRUE(all_true(cartan_contraction_transcript(g, kInf, c.epsilon, c.attracting, c.repelling)));
  };
  check(xi, sx.forward);
  check(x, sx.backward);
  check(yi, sy.forward);
  check(y, sy.backward);
  EXPECT_NO_THROW(verify_ping_pong(xi, yi, sx, sy));
}

// If g is eps-contracting with (v, H), then h g h^-1 is L eps-contracting with
// (h v, h H) where L bounds the Lipschitz constant of h.
TEST(PingPong, ConjugationCovariance) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> ent(-2, 2);
  QMatrix const g = diag2(100);
  auto const c = contraction_from_cartan(g, kInf, Rational(1, 100));
  int tested = 0;
  while (tested < 5) {
    long a = ent(rng), b = ent(rng), cc = ent(rng);
    if (a == 0) continue;
    QMatrix h = m2(Rational(a), Rational(b), Rational(cc), exact::make_rational(1 + b * cc, a));
    Rational const lip = projgeom::lipschitz_bound(h, kInf).value.hi();
    Rational const eps = c.epsilon * lip;
    if (eps >= Rational(1, 2)) continue;
    QVector const hv = h * c.attracting;
    // Forms transform by f o h^-1.
    QMatrix const hi = exact::inverse(h);
    QVector hf(2, Rational(0));
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < 2; ++i) hf[j] += c.repelling[i] * hi(i, j);
    }
    EXPECT_NO_THROW(verify_contracting(conj(h, g), kInf, eps, hv, hf));
    ++tested;
  }
}

TEST(Oracle, IdentityPairFailsAtLengthOne) {
  auto const r = free_word_oracle(QMatrix::identity(2), QMatrix::identity(2), 3);
  EXPECT_FALSE(r.free);
  EXPECT_EQ(r.failing_word.size(), 1u);
}

TEST(Oracle, CommutingPairFailsAtCommutator) {
  auto const r = free_word_oracle(diag2(2), diag2(3), 6);
  EXPECT_FALSE(r.free);
  EXPECT_EQ(r.failing_word.size(), 4u);
  EXPECT_EQ(oracle_word_string(r.failing_word), "x y x^-1 y^-1");
}

TEST(Oracle, SanovPairIsFreeToLengthTen) {
  auto const r = free_word_oracle(m2(1, 2, 0, 1), m2(1, 0, 2, 1), 10);
  EXPECT_TRUE(r.free);
  // 4 * (3^10 - 1) / 2 nontrivial reduced words.
  EXPECT_EQ(r.words_checked, 118096u);
}

TEST(Oracle, FiniteOrderDetected) {
  // S has order 4: S^4 = id.
  auto const r = free_word_oracle(m2(0, -1, 1, 0), m2(1, 1, 0, 1), 5);
  EXPECT_FALSE(r.free);
  EXPECT_EQ(r.failing_word.size(), 4u);
}

TEST(Oracle, Budget) {
  EXPECT_EQ(code_of([] { free_word_oracle(m2(1, 2, 0, 1), m2(1, 0, 2, 1), 10, 100); }),
            ErrorCode::BudgetExceeded);
}

// Any ping-pong certificate must pass the oracle.
TEST(PingPong, SoundnessOnRandomConjugates) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> ent(-3, 3);
  int certified = 0;
  for (int trial = 0; trial < 40 && certified < 6; ++trial) {
    long a = ent(rng), b = ent(rng), c = ent(rng);
    if (a == 0) continue;
    QMatrix h = m2(Rational(a), Rational(b), Rational(c), exact::make_rational(1 + b * c, a));
    QMatrix const x = diag2(9);
    QMatrix const y = conj(h, x);
    try {
      auto const cert = ping_pong_from_cartan(x, y, kInf);
      (void)cert;
    } catch (const Error&) {
      continue;
    }
    ++certified;
    EXPECT_TRUE(free_word_oracle(x, y, 10).free);
  }
  EXPECT_GT(certified, 0);
}
