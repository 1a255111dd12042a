#include <benchmark/benchmark.h>

#include "epigame/epidemic.hpp"
#include "epigame/generators.hpp"

using namespace epigame;

namespace {

OverlayGraph complete_graph(int n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> targets;
    for (NodeId u = 0; u < n; ++u) {
        targets.push_back(u);
        for (NodeId v = 0; v < n; ++v)
            if (u != v) edges.emplace_back(u, v);
    }
    return OverlayGraph::build(n, edges, targets);
}

void BM_ExactNonDelivery(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    OverlayGraph g = complete_graph(n);
    ForwardProfile p = ForwardProfile::uniform(g, 0.4, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(exact_non_delivery(g, p, {0}));
    state.SetComplexityN(n);
}
BENCHMARK(BM_ExactNonDelivery)->DenseRange(3, 9, 2)->Complexity();

void BM_PercolationNonDelivery(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    OverlayGraph g = complete_graph(n);
    ForwardProfile p = ForwardProfile::uniform(g, 0.4, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(percolation_non_delivery(g, p, {0}));
}
BENCHMARK(BM_PercolationNonDelivery)->DenseRange(3, 4, 1);

void BM_MonteCarloNonDelivery(benchmark::State& state) {
    OverlayGraph g = complete_graph(6);
    ForwardProfile p = ForwardProfile::uniform(g, 0.4, 0.3);
    long long trials = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_non_delivery(g, p, {0}, trials, 42));
    state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(BM_MonteCarloNonDelivery)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_ReliabilityCacheHit(benchmark::State& state) {
    OverlayGraph g = complete_graph(7);
    ForwardProfile p = ForwardProfile::uniform(g, 0.4, 0.3);
    ReliabilityCache cache(g);
    cache.non_delivery(p, 0);
    for (auto _ : state) benchmark::DoNotOptimize(cache.non_delivery(p, 0));
}
BENCHMARK(BM_ReliabilityCacheHit);

}  // namespace

BENCHMARK_MAIN();
