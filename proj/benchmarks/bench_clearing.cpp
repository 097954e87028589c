#include <benchmark/benchmark.h>

#include <cmath>

#include "random_bids.hpp"
#include "scenarios.hpp"
#include "socdispatch/pricing.hpp"
#include "socdispatch/rolling.hpp"

using namespace socdispatch;

namespace {

// T intervals of sinusoidal net demand, N three-segment EDCR storages and
// the usual generator / flexible-load backstops.
Scenario daily(std::size_t T, std::size_t N, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  Scenario sc;
  sc.T = T;
  for (std::size_t i = 0; i < N; ++i) {
    StorageUnit u;
    u.id = "es" + std::to_string(i + 1);
    u.bid = testing::random_edcr_bid(rng, 3);
    auto& sp = u.spec;
    sp.gCmax = sp.gDmax = sp.rCup = sp.rCdown = sp.rDup = sp.rDdown = 3.0;
    sp.eMin = u.bid.E.front();
    sp.eMax = u.bid.E.back();
    sp.s = 0.5 * (sp.eMin + sp.eMax);
    sc.fleet.push_back(std::move(u));
  }
  const double span = 3.0 * static_cast<double>(N) + 2.0;
  for (std::size_t t = 0; t < T; ++t)
    sc.demand.push_back(0.6 * span * std::sin(2.0 * M_PI * static_cast<double>(t) / static_cast<double>(T)));
  auto [gb, gs] = make_generator(35, 3 * span, 3 * span * static_cast<double>(T));
  sc.fleet.push_back({"gen", gb, gs, std::nullopt});
  auto [lb, ls] = make_flexible_load(2, 3 * span, 3 * span * static_cast<double>(T));
  sc.fleet.push_back({"load", lb, ls, std::nullopt});
  return sc;
}

void BM_OneShotHorizon(benchmark::State& state) {
  const auto sc = daily(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_one_shot(sc));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OneShotHorizon)->RangeMultiplier(2)->Range(4, 32)->Complexity()->Unit(benchmark::kMillisecond);

void BM_OneShotFleet(benchmark::State& state) {
  const auto sc = daily(12, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_one_shot(sc));
}
BENCHMARK(BM_OneShotFleet)->DenseRange(1, 5, 2)->Unit(benchmark::kMillisecond);

void BM_GammaMode(benchmark::State& state) {
  auto sc = daily(static_cast<std::size_t>(state.range(0)), 2);
  for (auto& u : sc.fleet) u.gamma = segment_of(u.bid, u.spec.s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_one_shot(sc, CostMode::end_segment_linear));
}
BENCHMARK(BM_GammaMode)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const auto sc = daily(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_enumerate(sc));
}
BENCHMARK(BM_Oracle)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_Rolling(benchmark::State& state) {
  const auto sc = daily(24, 2);
  const auto f = make_forecasts(sc, static_cast<std::size_t>(state.range(0)), {ForecastError::Kind::additive, {}, 1.0}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rolling_dispatch(sc, f, CostMode::epigraph));
}
BENCHMARK(BM_Rolling)->Arg(2)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_LocAudit(benchmark::State& state) {
  const auto sc = daily(24, 2);
  const auto s = solve_one_shot(sc);
  const auto p = extract_lmp(s);
  for (auto _ : state) benchmark::DoNotOptimize(loc_audit(sc, s, p));
}
BENCHMARK(BM_LocAudit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
