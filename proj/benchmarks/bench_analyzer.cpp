#include <benchmark/benchmark.h>

#include "epigame/analyzer.hpp"

using namespace epigame;

namespace {

Scenario complete_scenario(int n, bool grim) {
    Scenario sc;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> targets;
    for (NodeId u = 0; u < n; ++u) {
        targets.push_back(u);
        for (NodeId v = 0; v < n; ++v)
            if (u != v) edges.emplace_back(u, v);
    }
    sc.graph = OverlayGraph::build(n, edges, targets);
    sc.baseline = ForwardProfile::uniform(sc.graph, 0.5, 0.5);
    sc.params = UtilityParams::uniform(n, 3.0, 1.0, 0.9);
    sc.monitoring = MonitoringMode::Public;
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.durations = grim ? DurationPolicy::grim_trigger() : DurationPolicy::uniform(3);
    sc.options.offsets = {1};
    return sc;
}

void BM_DcCheck(benchmark::State& state) {
    Scenario sc = complete_scenario(static_cast<int>(state.range(0)), false);
    HistoryFamily fam = HistoryFamily::standard(sc);
    for (auto _ : state) benchmark::DoNotOptimize(dc_check(sc, fam));
}
BENCHMARK(BM_DcCheck)->DenseRange(3, 5, 1)->Unit(benchmark::kMillisecond);

void BM_EffectivenessThreshold(benchmark::State& state) {
    Scenario sc = complete_scenario(static_cast<int>(state.range(0)), true);
    HistoryFamily fam = HistoryFamily::standard(sc);
    for (auto _ : state) benchmark::DoNotOptimize(effectiveness_threshold(sc, fam));
}
BENCHMARK(BM_EffectivenessThreshold)->DenseRange(3, 4, 1)->Unit(benchmark::kMillisecond);

void BM_DiscountedDifference(benchmark::State& state) {
    Scenario sc = complete_scenario(4, false);
    DropDeviation dev{0, sc.graph.out_neighbors(0), 0};
    for (auto _ : state)
        benchmark::DoNotOptimize(discounted_difference(sc, HistorySeed{}, dev));
}
BENCHMARK(BM_DiscountedDifference)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
