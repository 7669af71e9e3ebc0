#include <benchmark/benchmark.h>

#include "pingpong/cli/commands.hpp"
#include "pingpong/comparison/comparison.hpp"
#include "pingpong/exact/ball.hpp"
#include "pingpong/projgeom/cartan.hpp"

using namespace pingpong;
using exact::QMatrix;
using exact::Rational;
using places::Place;

namespace {

QMatrix m2(long a, long b, long c, long d) { return QMatrix{{Rational(a), Rational(b)}, {Rational(c), Rational(d)}}; }

cli::json modular_doc() {
  cli::InputSpec in;
  in.dim = 2;
  in.generators = {m2(0, -1, 1, 0), m2(1, 1, 0, 1)};
  return cli::to_json(in);
}

}  // namespace

static void BM_CartanInfinity(benchmark::State& state) {
  QMatrix const g = m2(13, 8, 8, 5);
  for (auto _ : state) benchmark::DoNotOptimize(projgeom::cartan(g, Place::infinity(), true));
}
BENCHMARK(BM_CartanInfinity);

static void BM_CartanDyadic(benchmark::State& state) {
  QMatrix const g = QMatrix{{Rational(3, 4), Rational(5)}, {Rational(1, 8), Rational(2)}};
  for (auto _ : state) benchmark::DoNotOptimize(projgeom::cartan(g, Place::prime(2), true));
}
BENCHMARK(BM_CartanDyadic);

static void BM_ProjDist(benchmark::State& state) {
  auto const x = projgeom::ProjPoint::from_rational({Rational(3), Rational(-7), Rational(2)}, Place::infinity());
  auto const y = projgeom::ProjPoint::from_rational({Rational(1), Rational(4), Rational(9)}, Place::infinity());
  for (auto _ : state) benchmark::DoNotOptimize(projgeom::proj_dist(x, y));
}
BENCHMARK(BM_ProjDist);

static void BM_EnumerateBall(benchmark::State& state) {
  auto const sigma = cli::make_genset(cli::parse_input(modular_doc()));
  for (auto _ : state) benchmark::DoNotOptimize(exact::enumerate_ball(sigma, state.range(0)));
}
BENCHMARK(BM_EnumerateBall)->Arg(4)->Arg(8)->Arg(12);

static void BM_FreeWordOracle(benchmark::State& state) {
  QMatrix const x = m2(1, 2, 0, 1), y = m2(1, 0, 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::free_word_oracle(x, y, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FreeWordOracle)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_DeltaUpper(benchmark::State& state) {
  comparison::CompactSet const q{{m2(3, 5, 1, 2), m2(1, 1, 0, 1)}, Place::infinity()};
  for (auto _ : state) benchmark::DoNotOptimize(comparison::delta_upper(q));
}
BENCHMARK(BM_DeltaUpper)->Unit(benchmark::kMillisecond);

static void BM_CertifyFreeModular(benchmark::State& state) {
  auto const in = cli::parse_input(modular_doc());
  cli::RunConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cli::cmd_certify_free(in, cfg));
}
BENCHMARK(BM_CertifyFreeModular)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_VerifyCertModular(benchmark::State& state) {
  cli::RunConfig cfg;
  auto const cert = cli::cmd_certify_free(cli::parse_input(modular_doc()), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(cli::cmd_verify_cert(cert, cfg));
}
BENCHMARK(BM_VerifyCertModular)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_MAIN();
