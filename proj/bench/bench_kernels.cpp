// Serial reference loop against the OpenMP path for the grid kernels.
// Arg(0) is Execution::serial, Arg(1) Execution::parallel.

#include <benchmark/benchmark.h>

#include "relpend/autonomous.hpp"
#include "relpend/poincare.hpp"
#include "relpend/solver.hpp"

using namespace relpend;

namespace {

const PendulumParams kForced(0.2, kTwoPi, 0, ForcingSeries({0.1}, {0.0, 0.05}));

Execution exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_TwistMargin(benchmark::State& state) {
    const double pt = strip_bound(kForced).p_tilde;
    for (auto _ : state) benchmark::DoNotOptimize(twist_margin(kForced, {-pt, pt}, 16, {}, exec_of(state)));
}

void BM_BoundaryTwist(benchmark::State& state) {
    const auto bound = strip_bound(kForced);
    for (auto _ : state) benchmark::DoNotOptimize(boundary_twist_check(kForced, bound, 128, {}, exec_of(state)));
}

void BM_ReducedCurve(benchmark::State& state) {
    const auto bound = strip_bound(kForced);
    for (auto _ : state) benchmark::DoNotOptimize(build_reduced_curve(kForced, 90, bound, {}, 1e-12, exec_of(state)));
}

void BM_LibrationScan(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(min_libration_period_scan(0.25, 50, {}, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_TwistMargin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundaryTwist)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReducedCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LibrationScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
