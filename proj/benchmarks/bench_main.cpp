#include <benchmark/benchmark.h>

#include "bmdp/generator.hpp"
#include "bmdp/parser.hpp"
#include "bmdp/qlearner.hpp"
#include "bmdp/simulator.hpp"
#include "bmdp/solver.hpp"
#include "bmdp/suite.hpp"

using namespace bmdp;

namespace {

Bmdp random_model(std::int64_t types) {
    GenParams p = suite_gen_params(42);
    p.n_types = static_cast<std::size_t>(types);
    return gen_random_bmdp(p);
}

void BM_ValueIterateCloud1(benchmark::State& state) {
    const Bmdp m = cloud1();
    for (auto _ : state) benchmark::DoNotOptimize(value_iterate(m));
}
BENCHMARK(BM_ValueIterateCloud1);

void BM_ValueIterateCritical(benchmark::State& state) {
    const Bmdp m = cloud2_p50();
    for (auto _ : state) benchmark::DoNotOptimize(value_iterate(m));
}
BENCHMARK(BM_ValueIterateCritical);

void BM_ValueIterateRandom(benchmark::State& state) {
    const Bmdp m = random_model(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(value_iterate(m));
}
BENCHMARK(BM_ValueIterateRandom)->Arg(6)->Arg(24)->Arg(96);

void BM_LearnCloud1(benchmark::State& state) {
    const Bmdp m = cloud1();
    LearnParams p;
    p.ep_n = static_cast<std::size_t>(state.range(0));
    std::size_t updates = 0;
    for (auto _ : state) {
        const LearnResult r = run_learning(m, p);
        updates += r.updates;
        benchmark::DoNotOptimize(r.estimate);
    }
    state.counters["updates/s"] = benchmark::Counter(static_cast<double>(updates), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_LearnCloud1)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_RandomUpdate(benchmark::State& state) {
    const Bmdp m = random_model(6);
    LearnParams p;
    p.schedule = Schedule::Harmonic;
    for (auto _ : state) benchmark::DoNotOptimize(run_random_update(m, p, 100000).estimate);
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_RandomUpdate)->Unit(benchmark::kMillisecond);

void BM_MonteCarloCloud1(benchmark::State& state) {
    const Bmdp m = cloud1();
    const StaticStrategy sigma{ActionId{0}, ActionId{1}};
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_estimate(m, m.init, sigma, 10000, 10000, Rng(1)).mean);
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MonteCarloCloud1)->Unit(benchmark::kMillisecond);

void BM_ParseModel(benchmark::State& state) {
    const std::string text = serialize_model(random_model(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parse_model(text));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseModel)->Arg(6)->Arg(96);

void BM_SerializeModel(benchmark::State& state) {
    const Bmdp m = random_model(96);
    for (auto _ : state) benchmark::DoNotOptimize(serialize_model(m));
}
BENCHMARK(BM_SerializeModel);

}  // namespace

BENCHMARK_MAIN();
