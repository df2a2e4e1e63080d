#include <benchmark/benchmark.h>

#include <parsplit/frontier.hpp>
#include <parsplit/gibbs.hpp>
#include <parsplit/inference.hpp>
#include <parsplit/simulator.hpp>

using namespace parsplit;

namespace {

const SystemParams kReference{{30.0, 2.0, 1.0, 1.0}, {20.0, 6.0, 1.0, 1.0}};
const UnitParams kTruth{30.0, 2.0, 0.9, 0.8};

void BM_CompletionMoments(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(completion_moments(SplitFraction(0.5), kReference));
}
BENCHMARK(BM_CompletionMoments);

void BM_Sweep(benchmark::State& state) {
    SweepGrid grid;
    grid.steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(efficient_frontier(sweep(kReference, grid)));
}
BENCHMARK(BM_Sweep)->Arg(99)->Arg(999)->Unit(benchmark::kMillisecond);

void BM_PosteriorMoments(benchmark::State& state) {
    const BetaParams p{12.0, 3.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(posterior_moments([&](double x) { return p.log_density(x); }));
    }
}
BENCHMARK(BM_PosteriorMoments);

void BM_GibbsSweep(benchmark::State& state) {
    Rng data(1);
    const Batch batch(generate_trace(static_cast<std::size_t>(state.range(0)),
                                     SplitPolicy::uniform(0.1, 0.9), kTruth, data));
    Rng rng(2);
    GibbsConfig cfg;
    auto s = initial_state({}, batch, rng);
    for (auto _ : state) {
        s = gibbs_sweep(s, batch, cfg, rng);
        benchmark::DoNotOptimize(s.mu_sample);
    }
}
BENCHMARK(BM_GibbsSweep)->Arg(20)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_GibbsRun(benchmark::State& state) {
    Rng data(1);
    const auto records = generate_trace(1000, SplitPolicy::uniform(0.1, 0.9), kTruth, data);
    GibbsConfig cfg;
    cfg.max_batches = 50;
    for (auto _ : state) {
        Rng rng(3);
        benchmark::DoNotOptimize(run(vector_source(records), cfg, {}, rng));
    }
}
BENCHMARK(BM_GibbsRun)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
