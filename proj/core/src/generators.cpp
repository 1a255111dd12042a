#include "epigame/generators.hpp"

#include <algorithm>
#include <set>

namespace epigame {

OverlayGraph random_graph(SplitMix64& rng, const GraphGenOptions& opts) {
    int n = opts.min_nodes + static_cast<int>(rng.next_below(opts.max_nodes - opts.min_nodes + 1));

    std::vector<NodeId> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.next_below(i + 1)]);

    int target_count = 1 + static_cast<int>(rng.next_below(std::min(opts.max_source_targets, n)));
    std::vector<NodeId> source_targets(order.begin(), order.begin() + target_count);

    std::set<std::pair<NodeId, NodeId>> edge_set;
    auto add_edge = [&](NodeId u, NodeId v) {
        if (u == v) return;
        edge_set.insert({u, v});
        if (rng.next_double() < opts.reverse_edge_prob) edge_set.insert({v, u});
    };

    // Backbone: every node beyond the source targets hangs off an earlier
    // node, which keeps the graph connected from the source.
    for (int idx = target_count; idx < n; ++idx)
        add_edge(order[rng.next_below(idx)], order[idx]);

    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v)
            if (u != v && rng.next_double() < opts.extra_edge_prob) add_edge(u, v);

    if (edge_set.empty() && n >= 2) add_edge(order[0], order[1]);

    std::vector<std::pair<NodeId, NodeId>> edges(edge_set.begin(), edge_set.end());
    return OverlayGraph::build(n, edges, source_targets);
}

ForwardProfile random_profile_grid(SplitMix64& rng, const OverlayGraph& g,
                                   const std::vector<double>& grid) {
    std::vector<double> source_grid;
    for (double v : grid)
        if (v < 1.0) source_grid.push_back(v);

    ForwardProfile p = ForwardProfile::zeros(g);
    for (auto [u, v] : g.edges()) p.node[u][v] = grid[rng.next_below(grid.size())];
    bool positive = false;
    for (NodeId t : g.source_targets()) {
        p.source[t] = source_grid[rng.next_below(source_grid.size())];
        positive = positive || p.source[t] > 0.0;
    }
    if (!positive) {
        double v = 0.0;
        for (double cand : source_grid)
            if (cand > 0.0) {
                v = cand;
                break;
            }
        p.source[g.source_targets()[rng.next_below(g.source_targets().size())]] = v;
    }
    return p;
}

ForwardProfile random_profile_range(SplitMix64& rng, const OverlayGraph& g, double lo, double hi) {
    ForwardProfile p = ForwardProfile::zeros(g);
    auto draw = [&] { return lo + (hi - lo) * rng.next_double(); };
    for (auto [u, v] : g.edges()) p.node[u][v] = draw();
    for (NodeId t : g.source_targets()) p.source[t] = std::min(draw(), 0.999);
    return p;
}

namespace {

Scenario base_scenario(SplitMix64& rng, const ScenarioGenOptions& opts) {
    Scenario sc;
    sc.graph = random_graph(rng, opts.graph);
    sc.baseline = random_profile_range(rng, sc.graph, 0.1, 0.95);
    double beta = opts.min_beta + (opts.max_beta - opts.min_beta) * rng.next_double();
    sc.params = UtilityParams::uniform(sc.graph.node_count(), beta, 1.0, opts.omega);
    if (opts.force_full_indirect || rng.next_double() < 0.5)
        sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    else
        sc.rs.mode = ReactionSetConfig::Mode::Direct;
    int tau = opts.min_tau + static_cast<int>(rng.next_below(opts.max_tau - opts.min_tau + 1));
    sc.durations = DurationPolicy::uniform(tau);
    return sc;
}

}  // namespace

Scenario random_public_scenario(SplitMix64& rng, const ScenarioGenOptions& opts) {
    Scenario sc = base_scenario(rng, opts);
    sc.monitoring = MonitoringMode::Public;
    return sc;
}

Scenario random_private_scenario(SplitMix64& rng, const ScenarioGenOptions& opts) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Scenario sc = base_scenario(rng, opts);
        sc.monitoring = MonitoringMode::Private;
        sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
        sc.delays = compute_delays(sc.graph);
        bool coordinable = true;
        for (NodeId i = 0; i < sc.graph.node_count() && coordinable; ++i)
            if (max_accusation_delay(sc.graph, *sc.delays, i) == kInfiniteDelay) coordinable = false;
        if (!coordinable) continue;
        sc.durations = coordinated_durations(sc.graph, *sc.delays, sc.durations.base_tau());
        return sc;
    }
    fail(Errc::InvalidArgument, "could not draw a coordinable private scenario");
}

}  // namespace epigame
