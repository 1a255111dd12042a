#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "epigame/graph.hpp"

namespace epigame {

// One stage's forwarding probabilities: source[i] is the probability that
// node i receives a message directly from the source; node[u][v] is the
// probability that u forwards to v. Probabilities on non-edges are 0.
struct ForwardProfile {
    std::vector<double> source;              // size n, in [0, 1)
    std::vector<std::vector<double>> node;   // n x n, in [0, 1]

    static ForwardProfile zeros(const OverlayGraph& g);
    static ForwardProfile uniform(const OverlayGraph& g, double source_p, double node_p);

    bool operator==(const ForwardProfile&) const = default;
};

// Checks the baseline-profile invariants: probabilities in range, zero on
// non-edges, and at least one positive source probability.
void validate_baseline_profile(const OverlayGraph& g, const ForwardProfile& p);

struct MonteCarloEstimate {
    double mean = 0.0;
    long long trials = 0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

struct EpidemicCaps {
    int exact_nodes = 14;       // wave recursion state space is ~4^n
    int oracle_edges = 22;      // edge-state enumeration is 2^E
};

// Probability that no node of `targets` receives a message disseminated by
// the source, by the exact wave recursion over (settled, frontier) node-set
// pairs. q_i is the singleton-target case.
double exact_non_delivery(const OverlayGraph& g, const ForwardProfile& p,
                          const std::vector<NodeId>& targets, const EpidemicCaps& caps = {});

// Same probability via independent edge percolation: enumerate the success
// states of every positive-probability edge and test reachability. Slower,
// but an independent route kept as the reference the recursion is checked
// against.
double percolation_non_delivery(const OverlayGraph& g, const ForwardProfile& p,
                                const std::vector<NodeId>& targets, const EpidemicCaps& caps = {});

// Seeded simulation of the infection wave. Identical seeds give bit-identical
// estimates; trial streams are derived per-index so results do not depend on
// how trials are partitioned across workers. Partial miss counts from the
// workers merge by addition.
MonteCarloEstimate monte_carlo_non_delivery(const OverlayGraph& g, const ForwardProfile& p,
                                            const std::vector<NodeId>& targets,
                                            long long trials, std::uint64_t seed,
                                            int workers = 1);

// q_i under `p` and under the profile where only p_j[i] is lowered to
// `reduced`. Callers assert the single-punisher impact bound
// q' <= q * (1 - reduced) / (1 - p_j[i]).
std::pair<double, double> single_impact_ratio(const OverlayGraph& g, const ForwardProfile& p,
                                              NodeId i, NodeId j, double reduced,
                                              const EpidemicCaps& caps = {});

// Memoizing wrapper for repeated single-target reliability queries against
// profiles that recur across trajectory stages. Not thread-safe; use one per
// worker.
class ReliabilityCache {
public:
    explicit ReliabilityCache(const OverlayGraph& g, EpidemicCaps caps = {}) : g_(&g), caps_(caps) {}

    double non_delivery(const ForwardProfile& p, NodeId target);

    std::size_t size() const { return cache_.size(); }

private:
    const OverlayGraph* g_;
    EpidemicCaps caps_;
    std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace epigame
