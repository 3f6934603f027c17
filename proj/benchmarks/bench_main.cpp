#include <benchmark/benchmark.h>

#include "tandemfluid/analysis.hpp"
#include "tandemfluid/simulate.hpp"
#include "tandemfluid/spectral.hpp"
#include "tandemfluid/stability.hpp"

using namespace tandemfluid;

namespace {

void BM_FiniteBufferSpectrum(benchmark::State& state) {
    const auto p = SystemParams::nominal();
    for (auto _ : state) benchmark::DoNotOptimize(finite_buffer_spectrum(0.65, p).p_hat);
}
BENCHMARK(BM_FiniteBufferSpectrum);

void BM_CheckSufficient(benchmark::State& state) {
    const auto p = SystemParams::nominal();
    for (auto _ : state) benchmark::DoNotOptimize(check_sufficient(0.65, p));
}
BENCHMARK(BM_CheckSufficient);

void BM_ThroughputBounds(benchmark::State& state) {
    const auto p = SystemParams::nominal();
    for (auto _ : state) benchmark::DoNotOptimize(throughput_bounds(p).lower);
}
BENCHMARK(BM_ThroughputBounds)->Unit(benchmark::kMillisecond);

void BM_SimulateTwoLink(benchmark::State& state) {
    const auto p = SystemParams::nominal();
    SimConfig cfg;
    cfg.horizon = static_cast<double>(state.range(0));
    std::uint64_t events = 0;
    for (auto _ : state) {
        const auto st = simulate_replication(TwoLink{}, ConstantInflow{0.68}, p, cfg, 0);
        events += st.events;
        benchmark::DoNotOptimize(st.time_avg_total_queue);
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateTwoLink)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FullFractionEstimate(benchmark::State& state) {
    const auto p = SystemParams::nominal();
    for (auto _ : state) benchmark::DoNotOptimize(estimate_full_fraction(0.6, p, 1e5, 1).value);
}
BENCHMARK(BM_FullFractionEstimate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
