// Serial reference vs OpenMP point runner on the campaign kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "dextt/campaign.hpp"

using namespace dextt;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_ContestScaling(benchmark::State& state) {
  for (auto _ : state) {
    auto row = contest_scaling(16, 32, 1, mode(state));
    benchmark::DoNotOptimize(row.mean);
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_ContestScaling)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ValiditySweep(benchmark::State& state) {
  auto base = sweep_base_config();
  base.duration = 300;
  const std::vector<Seconds> points{13, 26, 52};
  const std::vector<std::uint64_t> seeds{1, 2};
  for (auto _ : state) {
    auto summary = sweep_validity(base, points, seeds, mode(state));
    benchmark::DoNotOptimize(summary.mean_corrupted.data());
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_ValiditySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DoubleSpendSuite(benchmark::State& state) {
  for (auto _ : state) {
    auto checks = map_points<VetoCheck>(
        16,
        [](std::size_t i) {
          auto cfg = random_double_spend_config(1000 + i);
          return check_double_spends(cfg, run(cfg));
        },
        mode(state));
    benchmark::DoNotOptimize(checks.data());
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_DoubleSpendSuite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
