#include <benchmark/benchmark.h>

#include "irwin/digits.hpp"
#include "irwin/series.hpp"

namespace {

// the expansion-level crossover study: deeper levels buy shorter
// coefficient streams at the cost of wider per-level blocks
void SumAtLevel(benchmark::State& state) {
  const irwin::ProblemSpec spec{10, 9, 0};
  const long digits = state.range(0);
  irwin::SeriesConfig cfg;
  cfg.level = static_cast<int>(state.range(1));
  long terms = 0;
  for (auto _ : state) {
    auto r = irwin::irwin_sum(spec, digits, cfg);
    terms = r.terms;
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["terms"] = static_cast<double>(terms);
}

void SumAutoLevel(benchmark::State& state) {
  const irwin::ProblemSpec spec{10, 9, 2};
  const long digits = state.range(0);
  for (auto _ : state) {
    auto r = irwin::irwin_sum(spec, digits);
    benchmark::DoNotOptimize(r.value);
  }
}

void PerCountBatch(benchmark::State& state) {
  const irwin::ProblemSpec spec{10, 9, static_cast<unsigned>(state.range(0))};
  for (auto _ : state) {
    auto rs = irwin::irwin_sum_per_count(spec, 100);
    benchmark::DoNotOptimize(rs.back().value);
  }
}

void PrefixTail(benchmark::State& state) {
  const irwin::ProblemSpec spec{10, 9, 1};
  for (auto _ : state) {
    auto r = irwin::prefix_tail(spec, 37, state.range(0));
    benchmark::DoNotOptimize(r.value);
  }
}

}  // namespace

BENCHMARK(SumAtLevel)
    ->ArgsProduct({{100, 500, 2000}, {2, 3}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(SumAutoLevel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(PerCountBatch)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(PrefixTail)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
