#include <benchmark/benchmark.h>

#include <cmath>

#include "reclab/neutral.hpp"
#include "reclab/quadrature.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/signal.hpp"

using namespace reclab;

namespace {

void BM_ScanSine(benchmark::State& state) {
    const Signal f = Signal::sine();
    const auto window = ProbeWindow::interval(-2.0, 2.0, 1e-2);
    const double hi = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(almost_period_set(f, 0.1, window, {0.0, hi}).max_gap);
    state.SetItemsProcessed(state.iterations() * static_cast<long>(hi / 1e-2));
}
BENCHMARK(BM_ScanSine)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ScanStepSequence(benchmark::State& state) {
    const Signal f = Signal::aa_step(AaBranch::Phi);
    const auto window = ProbeWindow::interval(-4.0, 4.0, 1e-2);
    for (auto _ : state) benchmark::DoNotOptimize(almost_period_set(f, 0.25, window, {0.0, 1000.0}).max_gap);
}
BENCHMARK(BM_ScanStepSequence)->Unit(benchmark::kMillisecond);

void BM_AdaptiveSimpson(benchmark::State& state) {
    const double w = static_cast<double>(state.range(0));
    const auto f = [w](double t, std::span<Complex> out) { out[0] = std::polar(1.0, w * t); };
    for (auto _ : state) benchmark::DoNotOptimize(adaptive_simpson(f, 0.0, 10.0, 1, 1e-8, panel_width(w)));
}
BENCHMARK(BM_AdaptiveSimpson)->Arg(1)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ChirpIntegral(benchmark::State& state) {
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) {
        // Fresh signal each pass so the checkpoint cache starts cold.
        const Signal pg = indefinite_integral(Signal::chirp(), 0.0);
        benchmark::DoNotOptimize(pg.eval(t));
    }
}
BENCHMARK(BM_ChirpIntegral)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GreenSolve(benchmark::State& state) {
    const OdeSystem ode = OdeSystem::scalar({2.0, 3.0});
    const Signal f = Signal::sine() + Signal::sine(std::sqrt(2.0));
    const double horizon = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(green_bounded_solve(ode, f, horizon).error_estimate);
}
BENCHMARK(BM_GreenSolve)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_HalflineSolve(benchmark::State& state) {
    const OdeSystem ode = OdeSystem::scalar({1.0, 0.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(ivp_halfline_solve(ode, Signal::zero(), {{0.0}, {1.0}}, 0.0, 1000.0, 1e-2).count());
}
BENCHMARK(BM_HalflineSolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
