#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rotnum/circle_maps.hpp"
#include "rotnum/drivers.hpp"
#include "rotnum/measures.hpp"
#include "rotnum/rotation.hpp"
#include "rotnum/schrodinger.hpp"

using namespace rotnum;

static void BM_SturmCount(benchmark::State& state) {
  const auto length = state.range(0);
  PotentialSpec spec;
  spec.noise = Distribution::uniform(0.0, 1.0);
  const auto v = sample_potential(spec, length, {0, stream_id(StreamPurpose::spectral, 0), 0});
  for (auto _ : state) benchmark::DoNotOptimize(sturm_count(v, 0.5));
  state.SetItemsProcessed(state.iterations() * length);
}
BENCHMARK(BM_SturmCount)->Arg(1 << 10)->Arg(1 << 17);

static void BM_BirkhoffAnderson(benchmark::State& state) {
  const CocycleFamily family = anderson_family(Distribution::uniform(0.0, 1.0));
  BirkhoffOptions opt;
  opt.n = state.range(0);
  opt.burn_in = opt.n / 10;
  opt.replicas = 1;
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_rho(family, 0.3, opt).value);
  state.SetItemsProcessed(state.iterations() * (opt.n + opt.burn_in));
}
BENCHMARK(BM_BirkhoffAnderson)->Arg(100000);

static void BM_BirkhoffMorseSmale(benchmark::State& state) {
  const CocycleFamily family = morse_smale_family(0.5, Distribution::atoms({{1.0, 0.5}, {2.0, 0.5}}));
  BirkhoffOptions opt;
  opt.n = state.range(0);
  opt.burn_in = opt.n / 10;
  opt.replicas = 1;
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_rho(family, 1e-3, opt).value);
  state.SetItemsProcessed(state.iterations() * (opt.n + opt.burn_in));
}
BENCHMARK(BM_BirkhoffMorseSmale)->Arg(100000);

static void BM_PhiPoints(benchmark::State& state) {
  std::vector<double> pos(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = uniform01(1, 1, static_cast<std::int64_t>(i));
  const auto nu = EmpiricalCircleMeasure::from_samples(pos);
  std::int64_t k = 0;
  for (auto _ : state) {
    const double a = 4.0 * uniform01(2, 2, k) - 2.0;
    const double b = 4.0 * uniform01(2, 3, k++) - 2.0;
    benchmark::DoNotOptimize(phi_points(nu, a, b));
  }
}
BENCHMARK(BM_PhiPoints)->Arg(1 << 10)->Arg(1 << 20);

static void BM_ProjectiveEval(benchmark::State& state) {
  const auto f = projectivize(transfer_matrix(0.3, 0.7));
  double y = 0.1;
  for (auto _ : state) {
    y = f.eval(y) - std::floor(y);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_ProjectiveEval);

static void BM_MorseSmaleInverse(benchmark::State& state) {
  const auto f = morse_smale(0.5).inverse();
  double y = 0.1;
  for (auto _ : state) {
    y = circle_point(f.eval(y) + 0.37);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_MorseSmaleInverse);

BENCHMARK_MAIN();
