#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "aloha/cb_analytic.hpp"
#include "aloha/comparator.hpp"
#include "aloha/optimizer.hpp"
#include "aloha/simulator.hpp"
#include "aloha/special_fn.hpp"

namespace {

using namespace aloha;

std::vector<double> principal_points() {
  std::vector<double> xs;
  for (int i = 0; i < 1024; ++i) xs.push_back(kMinusInvE + std::pow(10.0, -15.0 + 35.0 * i / 1024));
  return xs;
}

void BM_LambertW0(benchmark::State& state) {
  const std::vector<double> xs = principal_points();
  for (auto _ : state) {
    for (double x : xs) benchmark::DoNotOptimize(lambert_w0(x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_LambertW0);

void BM_LambertWm1(benchmark::State& state) {
  std::vector<double> xs;
  for (int i = 0; i < 1024; ++i) xs.push_back(kMinusInvE * std::pow(10.0, -300.0 * i / 1024));
  for (auto _ : state) {
    for (double x : xs) benchmark::DoNotOptimize(lambert_wm1(x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_LambertWm1);

void BM_Evaluate(benchmark::State& state) {
  const EnergyProfile e{1e5, 100.0, 1.0};
  double q = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate({100, 8.0, 4.0, 1.0, 0.004, q}, e));
    q = q < 0.5 ? q * 1.01 : 1e-4;
  }
}
BENCHMARK(BM_Evaluate);

void BM_Optimize(benchmark::State& state) {
  const EnergyProfile e{1e5, 100.0, 1.0};
  const CbParams p{100, 8.0, 4.0, 1.0, 0.01, 0.0};
  const double t0 = state.range(0) == 0 ? 0.0 : 0.5 * (t0_star(p, e) + e.max_lifetime());
  for (auto _ : state) benchmark::DoNotOptimize(optimize(p, e, t0));
}
BENCHMARK(BM_Optimize)->Arg(0)->Arg(1)->ArgNames({"constrained"});

void BM_RegimeMap(benchmark::State& state) {
  MapSpec spec;
  for (int k = 1; k <= 20; ++k) spec.ks.push_back(k);
  for (int i = 1; i <= 20; ++i) spec.packet_lens.push_back(0.5 * i);
  spec.lambda_n = 0.02;
  spec.energy = {1e5, 100.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(regime_map(spec));
}
BENCHMARK(BM_RegimeMap)->Unit(benchmark::kMillisecond);

void BM_SimulateRun(benchmark::State& state) {
  SimConfig c;
  c.cb = {100, 8.0, 4.0, 1.0, 0.004, state.range(0) * 1e-4};
  c.energy = {1e5, 100.0, 1.0};
  c.seed = 1;
  int run = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_run(c, run++));
}
BENCHMARK(BM_SimulateRun)->Arg(2)->Arg(100)->ArgNames({"q_e4"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
