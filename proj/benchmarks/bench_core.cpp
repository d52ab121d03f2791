#include <benchmark/benchmark.h>

#include "gsr/keyrate.hpp"
#include "gsr/optimizer.hpp"
#include "gsr/oracle.hpp"
#include "gsr/sequencer.hpp"
#include "gsr/timing.hpp"
#include "gsr/tree_analytics.hpp"

using namespace gsr;

namespace {

RunConfig base_config(Protocol protocol, Scheme scheme) {
    RunConfig c;
    c.protocol = protocol;
    c.scheme = scheme;
    c.emitter = EmitterParams::from_ghz(10.0, 1e-3);
    c.geometry = protocol == Protocol::tree ? Geometry(TreeGeometry({4, 16, 5}))
                                            : Geometry(RgsGeometry(32, TreeGeometry({24, 7})));
    c.m = 500;
    return c;
}

void BM_TreeSuccess(benchmark::State& state) {
    TreeGeometry t({4, 16, 5});
    for (auto _ : state) benchmark::DoNotOptimize(tree_success(t, 0.14, 0));
}
BENCHMARK(BM_TreeSuccess);

void BM_DecodingError(benchmark::State& state) {
    TreeGeometry t({4, 16, 5});
    for (auto _ : state) benchmark::DoNotOptimize(decoding_error(t, 0.14, 1e-4));
}
BENCHMARK(BM_DecodingError);

void BM_Evaluate(benchmark::State& state) {
    RunConfig c = base_config(static_cast<Protocol>(state.range(0)), Scheme::feedback);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(c));
}
BENCHMARK(BM_Evaluate)->Arg(static_cast<int>(Protocol::tree))->Arg(static_cast<int>(Protocol::rgs));

void BM_OptimizeReduced(benchmark::State& state) {
    RunConfig c = base_config(Protocol::tree, Scheme::feedback);
    SearchSpace space;
    space.b_max = 6;
    space.m_plus_1_max = 400;
    OptimizeOptions opt;
    opt.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(optimize(c, space, opt));
}
BENCHMARK(BM_OptimizeReduced)->Unit(benchmark::kMillisecond);

void BM_BuildSchedule(benchmark::State& state) {
    RunConfig c = base_config(Protocol::rgs, Scheme::feedback);
    GateTimes g = derive_gate_times(c.emitter, c.scheme);
    for (auto _ : state) benchmark::DoNotOptimize(build_schedule(c.protocol, c.scheme, c.geometry, g));
}
BENCHMARK(BM_BuildSchedule)->Unit(benchmark::kMicrosecond);

void BM_McTreeError(benchmark::State& state) {
    McOptions opt;
    opt.trials = 100000;
    opt.workers = 1;
    TreeGeometry t({4, 16, 5});
    for (auto _ : state) benchmark::DoNotOptimize(mc_tree_logical_error(t, 0.14, 1e-3, opt));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(opt.trials));
}
BENCHMARK(BM_McTreeError)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
