// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "pingpong/cli/commands.hpp"
#include "pingpong/comparison/comparison.hpp"
#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/projgeom/cartan.hpp"
#include "pingpong/projgeom/projective.hpp"

using namespace pingpong;
using exact::QMatrix;
using exact::QVector;
using exact::Rational;
using places::LocalScalar;
using places::Place;
using places::Relation;
using places::Verdict;
using projgeom::ProjPoint;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

QMatrix m2(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  return QMatrix{{a, b}, {c, d}};
}

QMatrix const kT = m2(1, 1, 0, 1);
QMatrix const kU = m2(1, 0, 1, 1);
QMatrix const kS = m2(0, -1, 1, 0);
QMatrix const kD = m2(2, 0, 0, Rational(1, 2));

// Random word of length 1..6 in T^{+-1}, U^{+-1}, diag(2, 1/2)^{+-1}.
QMatrix random_dyadic(std::mt19937_64& rng) {
  std::vector<QMatrix> const letters{kT, exact::inverse(kT), kU, exact::inverse(kU), kD, exact::inverse(kD)};
  QMatrix g = QMatrix::identity(2);
  int const len = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < len; ++i) g = g * letters[rng() % letters.size()];
  return g;
}

QMatrix random_sl2z(std::mt19937_64& rng, long bound) {
  std::uniform_int_distribution<long> ent(-bound, bound);
  while (true) {
    long a = ent(rng), b = ent(rng), c = ent(rng), d = ent(rng);
    if (a * d - b * c == 1) return m2(Rational(a), Rational(b), Rational(c), Rational(d));
  }
}

QVector random_vector(std::mt19937_64& rng, std::size_t d) {
  std::uniform_int_distribution<long> ent(-20, 20);
  while (true) {
    QVector v(d);
    bool nonzero = false;
    for (auto& x : v) {
      x = ent(rng);
      nonzero = nonzero || x != 0;
    }
    if (nonzero) return v;
  }
}

// sqrt(a) <= sqrt(b) + sqrt(c) for nonnegative rationals, decided exactly.
bool sqrt_triangle(const Rational& a, const Rational& b, const Rational& c) {
  Rational const t = a - b - c;
  if (t <= 0) return true;
  return t * t <= 4 * b * c;
}

cli::json doc_of(std::size_t dim, std::vector<unsigned long> primes, std::vector<QMatrix> gens) {
  cli::InputSpec in;
  in.dim = dim;
  in.primes = std::move(primes);
  in.generators = std::move(gens);
  return cli::to_json(in);
}

// ---------------------------------------------------------------------------

Outcome metric_suite() {
  Outcome out;
  std::mt19937_64 rng(101);
  std::size_t checked = 0;
  for (Place const place : {Place::infinity(), Place::prime(2), Place::prime(5)}) {
    for (std::size_t d : {2u, 3u}) {
      for (int t = 0; t < 500; ++t) {
        QVector const a = random_vector(rng, d), b = random_vector(rng, d), c = random_vector(rng, d);
        auto const x = ProjPoint::from_rational(a, place), y = ProjPoint::from_rational(b, place),
                   z = ProjPoint::from_rational(c, place);
        ++checked;
        std::string const where = place.to_string() + " d=" + std::to_string(d) + " #" + std::to_string(t);
        auto const dxy = projgeom::proj_dist(x, y), dyx = projgeom::proj_dist(y, x);
        if (!(dxy.value == dyx.value && dxy.log_p == dyx.log_p)) out.fail("asymmetric distance at " + where);
        if (place.is_infinite()) {
          auto const sxy = projgeom::proj_dist_sq(x, y), syz = projgeom::proj_dist_sq(y, z),
                     sxz = projgeom::proj_dist_sq(x, z);
          if (!sxy.is_point() || !syz.is_point() || !sxz.is_point()) {
            out.fail("squared distance not exact at " + where);
            continue;
          }
          if (sxy != projgeom::proj_dist_sq(y, x)) out.fail("asymmetric squared distance at " + where);
          if (!sqrt_triangle(sxz.lo(), sxy.lo(), syz.lo())) out.fail("triangle inequality fails at " + where);
        } else {
          auto const dyz = projgeom::proj_dist(y, z), dxz = projgeom::proj_dist(x, z);
          if (places::compare(dxz, places::max(dxy, dyz), Relation::Le) != Verdict::True) {
            out.fail("ultrametric inequality not certified at " + where);
          }
        }
      }
    }
  }
  out.detail = out.pass ? std::to_string(checked) + " triples" : out.detail;
  return out;
}

Outcome lipschitz_suite() {
  Outcome out;
  std::mt19937_64 rng(202);
  std::size_t grids = 0;
  for (int t = 0; t < 100; ++t) {
    QMatrix const g = random_dyadic(rng);
    for (Place const place : {Place::infinity(), Place::prime(2)}) {
      std::string const where = "element " + std::to_string(t) + " at " + place.to_string();
      auto const cd = projgeom::cartan(g, place);
      LocalScalar const ratio = cd.a[0] / cd.a[1];
      LocalScalar const bound = ratio * ratio;
      for (int s = 0; s < 5; ++s) {
        QVector const v = random_vector(rng, 2), w = random_vector(rng, 2);
        auto const pv = ProjPoint::from_rational(v, place), pw = ProjPoint::from_rational(w, place);
        auto const gv = projgeom::apply(g, pv), gw = projgeom::apply(g, pw);
        Verdict ok = Verdict::Undecided;
        if (place.is_infinite()) {
          // squared form: d(gv,gw)^2 <= bound^2 d(v,w)^2 with exact squared distances
          auto const lhs = projgeom::proj_dist_sq(gv, gw), rhs = projgeom::proj_dist_sq(pv, pw);
          places::Interval const b2 = bound.value * bound.value;
          if (lhs.hi() <= b2.lo() * rhs.lo()) {
            ok = Verdict::True;
          } else if (b2.is_point() && lhs.is_point() && rhs.is_point()) {
            ok = lhs.lo() <= b2.lo() * rhs.lo() ? Verdict::True : Verdict::False;
          }
        } else {
          ok = places::compare(projgeom::proj_dist(gv, gw), bound * projgeom::proj_dist(pv, pw), Relation::Le);
        }
        if (ok != Verdict::True) out.fail("Lipschitz bound not certified for " + where);
      }
      // a_2/a_1 <= eps^2 for the smallest dyadic eps <= 1/2: the grid must pass at eps.
      auto const cand = dynamics::cartan_candidate(g, place);
      if (!cand) continue;
      LocalScalar const inv_ratio = cd.a[1] / cd.a[0];
      std::optional<Rational> eps;
      for (Rational e(1, 2); e >= Rational(1, 1 << 20); e /= 2) {
        if (places::compare(inv_ratio, LocalScalar{place, places::Interval(Rational(e * e)), {}}, Relation::Le) != Verdict::True) {
          break;
        }
        eps = e;
      }
      if (!eps) continue;
      try {
        dynamics::verify_contracting(g, place, *eps, cand->attracting, cand->repelling);
        ++grids;
      } catch (const Error& e) {
        out.fail("grid fails at eps=" + exact::to_string(*eps) + " for " + where + ": " + e.what());
      }
    }
  }
  if (out.pass) out.detail = "100 elements x 2 places, 5 pairs each; " + std::to_string(grids) + " grid checks";
  return out;
}

Outcome comparison_suite() {
  Outcome out;
  std::mt19937_64 rng(303);
  for (int t = 0; t < 100; ++t) {
    std::vector<QMatrix> q;
    std::size_t const n = 1 + rng() % 3;
    for (std::size_t k = 0; k < n; ++k) q.push_back(random_sl2z(rng, 10));
    auto const r = comparison::comparison_experiment(comparison::CompactSet{q, Place::infinity()}, {}, 4);
    if (r.checks.size() != 4) out.fail("expected 4 checks for set " + std::to_string(t));
    for (auto const& c : r.checks) {
      if (c.verdict != Verdict::True) out.fail("set " + std::to_string(t) + ": " + c.label + " not certified");
    }
  }
  // Nilpotency against Lambda(Q^i) = 0 for i <= 4.
  std::uniform_int_distribution<long> ent(-2, 2);
  int nilpotent = 0, built = 0;
  while (built < 50) {
    std::size_t const d = 2 + built % 2;
    QMatrix g = QMatrix::identity(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) g(i, j) = ent(rng);
    }
    for (std::size_t i = 1; i < d; ++i) g(i, 0) = ent(rng);
    if (exact::det(g) == 0) continue;
    std::vector<QMatrix> q;
    for (int k = 0; k < 2; ++k) {
      QMatrix m(d, d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) m(i, j) = ent(rng);
      }
      if (built % 3 == 0 && k == 1) m(d - 1, 0) = 1;
      if (built % 5 == 1 && k == 0) m(0, 0) = 1;
      q.push_back(g * m * exact::inverse(g));
    }
    bool all_zero = true;
    for (int i = 1; i <= 4; ++i) {
      auto const l = comparison::lambda_of_power_set(comparison::CompactSet{q, Place::infinity()}, i);
      all_zero = all_zero && l.value == places::Interval(0L);
    }
    bool const test = comparison::nilpotency_test(comparison::CompactSet{q, Place::infinity()});
    if (test != all_zero) out.fail("nilpotency test disagrees on algebra " + std::to_string(built));
    nilpotent += test ? 1 : 0;
    ++built;
  }
  if (out.pass) {
    out.detail = "100 sets, 4 powers each; 50 algebras (" + std::to_string(nilpotent) + " nilpotent)";
  }
  return out;
}

Outcome sandwich_suite() {
  Outcome out;
  std::mt19937_64 rng(404);
  for (int t = 0; t < 100; ++t) {
    QMatrix const h = random_dyadic(rng);
    for (Place const place : {Place::infinity(), Place::prime(2)}) {
      for (auto const& c : comparison::sandwich_checks(h, place)) {
        if (c.verdict != Verdict::True) {
          out.fail("element " + std::to_string(t) + " at " + place.to_string() + ": " + c.label + " is " +
                   std::string(places::to_string(c.verdict)));
        }
      }
    }
  }
  if (out.pass) out.detail = "100 elements at inf and 2";
  return out;
}

struct Case {
  std::string name;
  cli::json input;
  cli::json certificate;
};

std::vector<Case> free_cases() {
  return {{"SL2(Z) S,T", doc_of(2, {}, {kS, kT}), {}},
          {"T,U", doc_of(2, {}, {kT, kU}), {}},
          {"diag(2,1/2),[[1,1],[1,2]] over Z[1/2]", doc_of(2, {2}, {kD, m2(1, 1, 1, 2)}), {}}};
}

Outcome freeness_suite(std::vector<Case>& cases) {
  Outcome out;
  std::ostringstream detail;
  cli::RunConfig cfg;
  for (auto& c : cases) {
    try {
      auto const in = cli::parse_input(c.input);
      cli::json const cert = cli::cmd_certify_free(in, cfg);
      // through text, as a file would be
      c.certificate = cli::json::parse(cert.dump());
      std::size_t const lx = c.certificate["length_x"].get<std::size_t>();
      std::size_t const ly = c.certificate["length_y"].get<std::size_t>();
      if (lx > 50 || ly > 50) out.fail(c.name + ": word lengths " + std::to_string(lx) + "/" + std::to_string(ly));
      auto const report = cli::cmd_verify_cert(c.certificate, cfg);
      if (report["status"] != "pass") out.fail(c.name + ": verify-cert did not pass");
      if (report["oracle"]["depth"].get<int>() < 10) out.fail(c.name + ": oracle depth below 10");
      auto const x = exact::word_eval(cli::make_genset(in), cli::word_from_json(c.certificate["word_x"]));
      auto const y = exact::word_eval(cli::make_genset(in), cli::word_from_json(c.certificate["word_y"]));
      if (!dynamics::free_word_oracle(x, y, 10).free) out.fail(c.name + ": oracle finds a relation");
      detail << c.name << " " << lx << "/" << ly << " (" << c.certificate["method"].get<std::string>() << "); ";
    } catch (const std::exception& e) {
      out.fail(c.name + ": " + e.what());
    }
  }
  if (out.pass) out.detail = detail.str();
  return out;
}

Outcome negative_suite(double& worst) {
  Outcome out;
  struct Neg {
    std::string name;
    cli::json input;
    std::string expect;
  };
  QMatrix perm(3, 3);
  perm(0, 2) = perm(1, 0) = perm(2, 1) = 1;
  std::vector<Neg> const negs{
      {"abelian", doc_of(2, {}, {m2(2, 1, 1, 1), m2(5, 3, 3, 2)}), "commute"},
      {"finite", doc_of(3, {}, {perm, QMatrix::diagonal({Rational(-1), Rational(-1), Rational(1)})}), "finite group"},
      {"solvable", doc_of(2, {2}, {kD, kT}), "common fixed point"}};
  cli::RunConfig cfg;
  std::ostringstream detail;
  worst = 0;
  for (auto const& n : negs) {
    auto const start = std::chrono::steady_clock::now();
    try {
      cli::cmd_certify_free(cli::parse_input(n.input), cfg);
      out.fail(n.name + ": a certificate was produced");
    } catch (const construct::NotFoundError& e) {
      auto const& d = e.diagnoses();
      bool found = false;
      for (auto const& s : d) found = found || s.find(n.expect) != std::string::npos;
      if (!found) out.fail(n.name + ": diagnoses lack '" + n.expect + "'");
      detail << n.name << ": " << (d.empty() ? std::string("-") : d.front()) << "; ";
    } catch (const std::exception& e) {
      out.fail(n.name + ": unexpected error " + e.what());
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    worst = std::max(worst, secs);
    if (secs > 60) out.fail(n.name + " took " + std::to_string(secs) + " s");
  }
  if (out.pass) out.detail = detail.str();
  return out;
}

Outcome growth_suite(const std::vector<Case>& cases) {
  Outcome out;
  auto const g = cli::cmd_growth(doc_of(2, {}, {kS, kT}), 8);
  auto const sizes = g["ball_sizes"].get<std::vector<std::size_t>>();
  if (sizes.size() != 8) out.fail("expected 8 ball sizes");
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    if (sizes[k] <= sizes[k - 1]) out.fail("ball sizes not strictly increasing at n=" + std::to_string(k + 1));
  }
  double const lambda = g["lambda_hat"].get<double>();
  if (!(lambda > 1)) out.fail("lambda_hat <= 1");
  std::ostringstream detail;
  detail << "SL2(Z) sizes " << g["ball_sizes"].dump() << ", lambda_hat " << lambda << "; ";
  std::size_t pairs = 0;
  for (auto const& c : cases) {
    if (c.certificate.is_null()) {
      out.fail(c.name + ": no certificate from the freeness run");
      continue;
    }
    auto const f = cli::cmd_growth(c.certificate, 6);
    auto const fs = f["ball_sizes"].get<std::vector<std::size_t>>();
    for (std::size_t n = 1; n <= fs.size(); ++n) {
      if (fs[n - 1] != cli::free_ball_size(2, n)) {
        out.fail(c.name + ": |S^" + std::to_string(n) + "| = " + std::to_string(fs[n - 1]));
      }
    }
    ++pairs;
  }
  detail << pairs << " certified pairs match 2*3^n-1 for n <= 6";
  if (out.pass) out.detail = detail.str();
  return out;
}

Outcome tamper_suite(const std::vector<Case>& cases) {
  Outcome out;
  namespace fs = std::filesystem;
  fs::path const dir = fs::temp_directory_path() / ("pingpong_tamper_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::mt19937_64 rng(808);
  cli::RunConfig cfg;
  int rejected = 0;
  for (int t = 0; t < 20; ++t) {
    auto const& c = cases[t % cases.size()];
    if (c.certificate.is_null()) {
      out.fail(c.name + ": no certificate to tamper with");
      continue;
    }
    cli::json bad = c.certificate;
    auto& seps = bad["certificate"]["separations"];
    auto& cmp = seps[rng() % seps.size()];
    auto& scalar = cmp[(rng() % 2) ? "lhs" : "rhs"];
    if (scalar.contains("log_p")) {
      scalar["log_p"] = exact::to_string(exact::parse_rational(scalar["log_p"].get<std::string>()) + 1);
    } else {
      Rational const rho = exact::parse_rational(scalar["radius"].get<std::string>());
      Rational const center = exact::parse_rational(scalar["center"].get<std::string>());
      // beyond the radius by a random fraction of it (or a fixed step when rho = 0)
      Rational const step = rho > 0 ? rho * Rational(static_cast<long>(1 + rng() % 100), 100) : Rational(1, 1 << 20);
      Rational const shift = rho + step;
      Rational const moved = (rng() % 2) ? Rational(center + shift) : Rational(center - shift);
      scalar["center"] = exact::to_string(moved);
    }
    fs::path const file = dir / ("mutated_" + std::to_string(t) + ".json");
    std::ofstream(file) << bad.dump(2);
    std::ifstream in(file);
    cli::json const reread = cli::json::parse(in);
    try {
      cli::cmd_verify_cert(reread, cfg);
      out.fail("mutation " + std::to_string(t) + " was accepted");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ReplayMismatch) {
        ++rejected;
      } else {
        out.fail("mutation " + std::to_string(t) + " gave " + std::string(to_string(e.code())));
      }
    }
  }
  fs::remove_all(dir);
  if (out.pass) out.detail = std::to_string(rejected) + "/20 mutated files rejected with ReplayMismatch";
  return out;
}

bool report(int n, const char* name, double limit, const std::function<Outcome()>& body) {
  auto const start = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.fail(std::string("uncaught: ") + e.what());
  }
  double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit) r.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limit) + " s");
  std::printf("criterion %d %-26s %s  %.2fs  %s\n", n, name, r.pass ? "PASS" : "FAIL", secs, r.detail.c_str());
  std::fflush(stdout);
  return r.pass;
}

}  // namespace

int main() {
  bool ok = true;
  std::vector<Case> cases = free_cases();
  ok &= report(1, "metric suite", 30, metric_suite);
  ok &= report(2, "Lipschitz bound", 120, lipschitz_suite);
  ok &= report(3, "comparison inequality", 300, comparison_suite);
  ok &= report(4, "norm sandwich", 60, sandwich_suite);
  ok &= report(5, "end-to-end freeness", 300, [&] { return freeness_suite(cases); });
  double worst = 0;
  ok &= report(6, "negative controls", 180, [&] { return negative_suite(worst); });
  ok &= report(7, "growth", 180, [&] { return growth_suite(cases); });
  ok &= report(8, "tamper detection", 30, [&] { return tamper_suite(cases); });
  std::printf("acceptance: %s\n", ok ? "ALL PASS" : "FAILURES");
  return ok ? 0 : 1;
}
