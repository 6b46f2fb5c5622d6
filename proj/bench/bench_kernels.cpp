// Serial reference versus OpenMP paths of the sampling and enumeration kernels.
// Arg 0 selects the serial path, 1 the parallel one.

#include "lvr/matrix_model.hpp"
#include "lvr/perturbation.hpp"
#include "lvr/weingarten.hpp"

#include <benchmark/benchmark.h>

using namespace lvr;

static Execution exec_of(const benchmark::State& s) { return s.range(0) ? Execution::Parallel : Execution::Serial; }

static void BM_mc_partition(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc_partition({2, 3, 0.1}, 1, 50000, exec_of(state)));
}
BENCHMARK(BM_mc_partition)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_mc_cumulant(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_cumulant({2, 2, 0.1}, {{0}, {1}, {0}, {1}}, 1, 50000, exec_of(state)));
}
BENCHMARK(BM_mc_cumulant)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_haar_moment(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(haar_moment_mc({0, 1}, {0, 1}, {0, 1}, {1, 0}, 3, 50000, 1, exec_of(state)));
}
BENCHMARK(BM_haar_moment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_perturbative_series(benchmark::State& state) {
  PerturbationOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(perturbative_series(2, 1, 3, opts));
}
BENCHMARK(BM_perturbative_series)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
