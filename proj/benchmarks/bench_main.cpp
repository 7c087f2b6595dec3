#include <benchmark/benchmark.h>

#include "sp2/generator.hpp"
#include "sp2/progression.hpp"
#include "sp2/rta.hpp"
#include "sp2/simulator.hpp"

using namespace sp2;

namespace {

FlowSet instance(std::size_t flows, std::uint64_t seed = 7) {
    GeneratorParams p;
    p.rows = 8;
    p.cols = 8;
    p.flow_count = flows;
    p.flits_max = 64;
    p.period_min = 50;
    p.period_max = 800;
    p.seed = seed;
    return generate_flowset(p);
}

void BM_AnalyzeAll(benchmark::State& state) {
    const auto fs = instance(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(analyze_all(fs));
}
BENCHMARK(BM_AnalyzeAll)->RangeMultiplier(2)->Range(8, 128);

void BM_AnalyzeExhaustive(benchmark::State& state) {
    const auto fs = instance(static_cast<std::size_t>(state.range(0)));
    AnalysisOptions opt;
    opt.policy = XPolicy::Exhaustive;
    for (auto _ : state) benchmark::DoNotOptimize(analyze_all(fs, opt));
}
BENCHMARK(BM_AnalyzeExhaustive)->RangeMultiplier(2)->Range(8, 64);

void BM_Simulate(benchmark::State& state) {
    const auto fs = instance(static_cast<std::size_t>(state.range(0)));
    const Cycles horizon = 10'000;
    const auto rel = ReleasePattern::sporadic(fs, 3, horizon);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(fs, rel, horizon));
    state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_Simulate)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMillisecond);

void BM_CheckTrace(benchmark::State& state) {
    const auto fs = instance(32);
    const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 10'000), 10'000);
    for (auto _ : state) benchmark::DoNotOptimize(check_trace(trace, fs));
}
BENCHMARK(BM_CheckTrace)->Unit(benchmark::kMillisecond);

void BM_SeriesBounds(benchmark::State& state) {
    const int flits = static_cast<int>(state.range(0));
    const int eta = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(progression::series_bounds(flits, eta));
}
BENCHMARK(BM_SeriesBounds)->Args({6, 4})->Args({10, 3})->Args({16, 4})->Args({8, 6});

}  // namespace

BENCHMARK_MAIN();
