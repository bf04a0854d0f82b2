#include <benchmark/benchmark.h>

#include "irwin/digits.hpp"
#include "irwin/measure.hpp"
#include "irwin/moments.hpp"

namespace {

void GuardedTable(benchmark::State& state) {
  const irwin::ProblemSpec spec{10, 9, static_cast<unsigned>(state.range(0))};
  const int max_m = static_cast<int>(state.range(1));
  const auto prec = irwin::moment_working_prec(100, max_m);
  for (auto _ : state) {
    auto t = irwin::MomentTable::guarded(irwin::MomentKind::u, spec, max_m, prec);
    benchmark::DoNotOptimize(t.at(spec.k, max_m));
  }
}

void ExactTable(benchmark::State& state) {
  const irwin::ProblemSpec spec{10, 9, 2};
  const int max_m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto t = irwin::MomentTable::exact(irwin::MomentKind::u, spec, max_m);
    benchmark::DoNotOptimize(t.exact_at(spec.k, max_m));
  }
}

void BoundsBattery(benchmark::State& state) {
  const irwin::ProblemSpec spec{16, 8, 8};
  const auto t = irwin::MomentTable::guarded(
      irwin::MomentKind::u, spec, 60, irwin::moment_working_prec(60, 60));
  for (auto _ : state) {
    auto rep = irwin::check_bounds(t);
    benchmark::DoNotOptimize(rep.checked);
  }
}

void MeasureBuild(benchmark::State& state) {
  const irwin::ProblemSpec spec{2, 1, 3};
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto mu = irwin::build_measure(spec, len);
    benchmark::DoNotOptimize(mu.atom_count());
  }
}

void MomentRecursion(benchmark::State& state) {
  const irwin::ProblemSpec spec{2, 1, 5};
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rows = irwin::moment_matrix(spec, 20, len);
    benchmark::DoNotOptimize(rows.back().back());
  }
}

}  // namespace

BENCHMARK(GuardedTable)
    ->ArgsProduct({{0, 3}, {50, 200}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(ExactTable)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BoundsBattery)->Unit(benchmark::kMillisecond);
BENCHMARK(MeasureBuild)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(MomentRecursion)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
