#pragma once

#include "epigame/rng.hpp"
#include "epigame/scenario.hpp"

namespace epigame {

struct GraphGenOptions {
    int min_nodes = 2;
    int max_nodes = 8;
    double extra_edge_prob = 0.35;   // beyond the connecting backbone
    double reverse_edge_prob = 0.5;  // chance to bidirectionalize a drawn edge
    int max_source_targets = 3;
};

// Random directed overlay, connected from the source by construction.
OverlayGraph random_graph(SplitMix64& rng, const GraphGenOptions& opts = {});

// Random profile with probabilities drawn from a value grid (sources draw
// only the sub-unit values and at least one is forced positive).
ForwardProfile random_profile_grid(SplitMix64& rng, const OverlayGraph& g,
                                   const std::vector<double>& grid);

// Random profile with continuous probabilities in [lo, hi].
ForwardProfile random_profile_range(SplitMix64& rng, const OverlayGraph& g, double lo, double hi);

struct ScenarioGenOptions {
    GraphGenOptions graph{};
    int min_tau = 1;
    int max_tau = 5;
    double min_beta = 1.0;
    double max_beta = 20.0;
    double omega = 0.9;
    bool force_full_indirect = false;  // else mixes direct and full indirect
};

Scenario random_public_scenario(SplitMix64& rng, const ScenarioGenOptions& opts = {});

// Private-monitoring scenario with coordinated durations; regenerates until
// every in-neighbor delay is finite so coordination is possible.
Scenario random_private_scenario(SplitMix64& rng, const ScenarioGenOptions& opts = {});

}  // namespace epigame
