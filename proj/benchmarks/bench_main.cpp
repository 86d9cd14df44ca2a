#include <benchmark/benchmark.h>

#include "ics/engine.hpp"
#include "ics/experiments.hpp"
#include "ics/matlin.hpp"
#include "ics/mixture.hpp"
#include "ics/random.hpp"
#include "ics/scatter.hpp"
#include "ics/thresholds.hpp"

using namespace ics;

namespace {

Matrix normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Matrix x(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) x(i, j) = rng.normal();
  return x;
}

SpdMatrix random_spd(std::size_t p, std::uint64_t seed) {
  const Matrix b = normal_matrix(p, p, seed);
  Matrix a = b * b.transpose();
  for (std::size_t i = 0; i < p; ++i) a(i, i) += static_cast<double>(p);
  return SpdMatrix(a);
}

void BM_SymEig(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_spd(p, 1).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(a));
}
BENCHMARK(BM_SymEig)->Arg(5)->Arg(10)->Arg(25)->Arg(50);

void BM_GenEig(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const SpdMatrix v1 = random_spd(p, 2), v2 = random_spd(p, 3);
  for (auto _ : state) benchmark::DoNotOptimize(gen_eig(v1, v2));
}
BENCHMARK(BM_GenEig)->Arg(5)->Arg(10)->Arg(25)->Arg(50);

void BM_Scatter(benchmark::State& state, ScatterKind kind) {
  const Matrix x = normal_matrix(1000, 10, 4);
  CounterRng rng(5, 0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_scatter(x, kind, rng));
}
BENCHMARK_CAPTURE(BM_Scatter, cov, ScatterKind::cov());
BENCHMARK_CAPTURE(BM_Scatter, cov4, ScatterKind::cov4());
BENCHMARK_CAPTURE(BM_Scatter, covaxis, ScatterKind::cov_axis());
BENCHMARK_CAPTURE(BM_Scatter, tcov, ScatterKind::tcov())->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scatter, mcd50, ScatterKind::mcd(0.5))->Unit(benchmark::kMillisecond);

void BM_IcsFit(benchmark::State& state) {
  auto s = experiments::find_preset("k3-10-40-50");
  const Matrix x = experiments::sample_mixture(s, 0);
  const ScatterPair pair = ScatterPair::parse("cov-cov4");
  for (auto _ : state) benchmark::DoNotOptimize(ics_fit(x, pair));
}
BENCHMARK(BM_IcsFit);

void BM_DiracSpectrum(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const Matrix t = thresholds::default_centers(k);
  const std::vector<double> props(k, 1.0 / static_cast<double>(k));
  for (auto _ : state) benchmark::DoNotOptimize(theory::dirac_pop_ics(theory::MixtureSpec::dirac(props, t)));
}
BENCHMARK(BM_DiracSpectrum)->Arg(3)->Arg(10);

void BM_QuarticRoots(benchmark::State& state) {
  const auto poly = theory::quartic_r(1.0 / 6, 1.0 / 6);
  for (auto _ : state) benchmark::DoNotOptimize(theory::quartic_real_roots_detailed(poly));
}
BENCHMARK(BM_QuarticRoots);

void BM_ThresholdTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(thresholds::reproduce_table1());
}
BENCHMARK(BM_ThresholdTable)->Unit(benchmark::kMillisecond);

void BM_TernaryGrid(benchmark::State& state) {
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(experiments::ternary_grid(step));
}
BENCHMARK(BM_TernaryGrid)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
