#include <benchmark/benchmark.h>

#include <cmath>

#include "abh/correlations.hpp"
#include "abh/decoherence.hpp"
#include "abh/langevin.hpp"
#include "abh/profile.hpp"
#include "abh/quadrature.hpp"
#include "abh/specfun.hpp"

using namespace abh;

namespace {

const LineProfile kLine(0.9, 1.1, 1.0, 1.0);

EnvironmentSpec lorentz(double cutoff) {
  EnvironmentSpec s;
  s.coupling_eff = 0.3;
  s.cutoff = cutoff;
  return s;
}

void BM_Si(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(si(x));
}
BENCHMARK(BM_Si)->Arg(1)->Arg(10)->Arg(100);

void BM_ShiChiCombo(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stable_shi_chi_combo(1.0, -1.0, 300.0));
}
BENCHMARK(BM_ShiChiCombo);

void BM_Quadrature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate_adaptive([](double x) { return std::cos(50 * x) / (1 + x * x); }, 0.0, 10.0, 1e-12));
  }
}
BENCHMARK(BM_Quadrature);

void BM_DiffusionExact(benchmark::State& state) {
  const auto env = lorentz(100.0);
  for (auto _ : state) benchmark::DoNotOptimize(diffusion_exact(50.0, 1.0, env));
}
BENCHMARK(BM_DiffusionExact);

void BM_DiffusionOracle(benchmark::State& state) {
  const auto env = lorentz(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(diffusion_oracle(5.0, 1.0, env));
}
BENCHMARK(BM_DiffusionOracle)->Unit(benchmark::kMillisecond);

void BM_CorrClosedForm(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(corr_closed_form(-4.0, 3.0, 100.0, kInfiniteBeta, kLine));
}
BENCHMARK(BM_CorrClosedForm);

void BM_CorrModeSum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(corr_mode_sum_oracle(-4.0, 3.0, 100.0, 3.0, kLine));
}
BENCHMARK(BM_CorrModeSum)->Unit(benchmark::kMillisecond);

void BM_LatticeStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto lat = make_lattice(n, 0.05 * n, -0.025 * n);
  for (int i = 0; i < n; ++i) lat.field[i] = std::exp(-lat.x[i] * lat.x[i]);
  lat.time = 1.0;
  const double dt = 0.5 * max_stable_dt(lat, kLine);
  const EnvironmentSpec env;
  for (auto _ : state) {
    step(lat, dt, kLine, env);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LatticeStep)->Arg(128)->Arg(512);

}  // namespace
BENCHMARK_MAIN();
