#include <benchmark/benchmark.h>

#include "rbq/gm1.hpp"
#include "rbq/gmn1.hpp"
#include "rbq/mngn1.hpp"
#include "rbq/sim/simulator.hpp"
#include "rbq/transform.hpp"

using rbq::DistributionSpec;
using rbq::RateSchedule;

static void BM_SolveSigma(benchmark::State& state) {
  const rbq::gm1::Gm1Model model{DistributionSpec::erlang(3, 3.0), 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(rbq::gm1::solve_sigma(model));
}
BENCHMARK(BM_SolveSigma);

static void BM_DOperatorChain(benchmark::State& state) {
  const auto depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto t = rbq::Transform::base(DistributionSpec::uniform(0.5, 1.5));
    for (int i = 0; i < depth; ++i) t = rbq::d_operator(t, 1.0);
    benchmark::DoNotOptimize(t.eval(1.0));
  }
}
BENCHMARK(BM_DOperatorChain)->Arg(1)->Arg(4)->Arg(16);

static void BM_Gmn1SteadyState(benchmark::State& state) {
  const rbq::gmn1::Gmn1Model model{DistributionSpec::deterministic(1.0), RateSchedule({0.8, 1.2, 1.0}, 1.5)};
  for (auto _ : state) benchmark::DoNotOptimize(rbq::gmn1::steady_state_gmn1(model).pi.size());
}
BENCHMARK(BM_Gmn1SteadyState)->Unit(benchmark::kMillisecond);

static void BM_Mngn1SteadyState(benchmark::State& state) {
  const rbq::mngn1::MnGn1Model model{RateSchedule({1.4}, 1.0), {DistributionSpec::uniform(0.1, 0.7)},
                                     DistributionSpec::erlang(2, 4.0)};
  for (auto _ : state) benchmark::DoNotOptimize(rbq::mngn1::steady_state_mngn1(model).pi.size());
}
BENCHMARK(BM_Mngn1SteadyState)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  rbq::sim::SimConfig cfg{.model = rbq::gmn1::Gmn1Model{DistributionSpec::deterministic(1.0), RateSchedule(1.5)}};
  cfg.events = static_cast<std::uint64_t>(state.range(0));
  cfg.replications = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rbq::sim::simulate(cfg).events);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
