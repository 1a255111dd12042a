#include "epigame/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>

#include "epigame/rng.hpp"

namespace epigame {

ForwardProfile ForwardProfile::zeros(const OverlayGraph& g) {
    ForwardProfile p;
    p.source.assign(g.node_count(), 0.0);
    p.node.assign(g.node_count(), std::vector<double>(g.node_count(), 0.0));
    return p;
}

ForwardProfile ForwardProfile::uniform(const OverlayGraph& g, double source_p, double node_p) {
    ForwardProfile p = zeros(g);
    for (NodeId t : g.source_targets()) p.source[t] = source_p;
    for (auto [u, v] : g.edges()) p.node[u][v] = node_p;
    return p;
}

void validate_baseline_profile(const OverlayGraph& g, const ForwardProfile& p) {
    const int n = g.node_count();
    if (static_cast<int>(p.source.size()) != n || static_cast<int>(p.node.size()) != n)
        fail(Errc::InvalidArgument, "profile size does not match the graph");
    bool some_source = false;
    for (NodeId v = 0; v < n; ++v) {
        double ps = p.source[v];
        if (ps < 0.0 || ps > 1.0) fail(Errc::InvalidArgument, "source probability out of [0,1]");
        if (ps > 0.0 && !g.is_source_target(v))
            fail(Errc::InvalidArgument, "positive source probability off the source target set");
        some_source = some_source || ps > 0.0;
    }
    if (!some_source) fail(Errc::InvalidArgument, "some source probability must be positive");
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v) {
            double q = p.node[u][v];
            if (q < 0.0 || q > 1.0) fail(Errc::InvalidArgument, "forward probability out of [0,1]");
            if (q > 0.0 && !g.has_edge(u, v))
                fail(Errc::InvalidArgument, "positive probability on non-edge (" + std::to_string(u) +
                                                "," + std::to_string(v) + ")");
        }
}

namespace {

using Mask = std::uint32_t;

// Wave recursion state. Nodes occupy bits 0..n-1; the source is bit n.
// The value depends on (settled | frontier, frontier) only, which is the
// memo key: the per-step factors see the settled set only through the union.
struct WaveSolver {
    const OverlayGraph& g;
    const ForwardProfile& p;
    int n;
    Mask source_bit;
    Mask target_mask;
    std::unordered_map<std::uint64_t, double> memo;

    double miss_probability(Mask frontier, NodeId k) const {
        // Probability that no frontier member infects k this step.
        double m = 1.0;
        for (int l = 0; l < n; ++l)
            if (frontier & (Mask(1) << l)) m *= 1.0 - p.node[l][k];
        if (frontier & source_bit) m *= 1.0 - p.source[k];
        return m;
    }

    // No target can ever be reached from the frontier through
    // positive-probability edges over still-susceptible nodes. The remaining
    // outcome weights sum to one analytically, so returning 1 here keeps the
    // all-blocked cases exact instead of accumulating rounding dust.
    bool targets_unreachable(Mask covered, Mask frontier) const {
        Mask seen = 0;
        std::vector<NodeId> stack;
        auto push = [&](NodeId k) {
            Mask bit = Mask(1) << k;
            if ((seen | covered) & bit) return false;
            if (target_mask & bit) return true;
            seen |= bit;
            stack.push_back(k);
            return false;
        };
        if (frontier & source_bit)
            for (int k = 0; k < n; ++k)
                if (p.source[k] > 0.0 && push(k)) return false;
        for (int l = 0; l < n; ++l)
            if (frontier & (Mask(1) << l))
                for (int k = 0; k < n; ++k)
                    if (p.node[l][k] > 0.0 && push(k)) return false;
        while (!stack.empty()) {
            NodeId l = stack.back();
            stack.pop_back();
            for (int k = 0; k < n; ++k)
                if (p.node[l][k] > 0.0 && push(k)) return false;
        }
        return true;
    }

    double solve(Mask covered, Mask frontier) {
        if (frontier == 0) return 1.0;
        std::uint64_t key = (std::uint64_t(covered) << 20) | frontier;
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        if (targets_unreachable(covered, frontier)) {
            memo.emplace(key, 1.0);
            return 1.0;
        }

        std::vector<NodeId> candidates;   // susceptible non-target nodes
        double target_miss = 1.0;         // targets must stay uninfected
        for (int k = 0; k < n; ++k) {
            Mask bit = Mask(1) << k;
            if (covered & bit) continue;
            if (target_mask & bit)
                target_miss *= miss_probability(frontier, k);
            else
                candidates.push_back(k);
        }

        double total = 0.0;
        const int c = static_cast<int>(candidates.size());
        std::vector<double> hit(c), miss(c);
        for (int idx = 0; idx < c; ++idx) {
            miss[idx] = miss_probability(frontier, candidates[idx]);
            hit[idx] = 1.0 - miss[idx];
        }
        // Depth-first over infection outcomes of the candidates, carrying the
        // partial probability product and the new frontier mask.
        struct Frame {
            int idx;
            double prob;
            Mask next;
        };
        std::vector<Frame> stack{{0, 1.0, 0}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            if (f.prob == 0.0) continue;
            if (f.idx == c) {
                total += f.prob * solve(covered | f.next, f.next);
                continue;
            }
            stack.push_back({f.idx + 1, f.prob * miss[f.idx], f.next});
            stack.push_back({f.idx + 1, f.prob * hit[f.idx], Mask(f.next | (Mask(1) << candidates[f.idx]))});
        }
        total *= target_miss;
        memo.emplace(key, total);
        return total;
    }
};

Mask make_target_mask(const OverlayGraph& g, const std::vector<NodeId>& targets) {
    if (targets.empty()) fail(Errc::InvalidArgument, "targets must be non-empty");
    Mask m = 0;
    for (NodeId t : targets) {
        if (t < 0 || t >= g.node_count()) fail(Errc::InvalidArgument, "target out of range");
        m |= Mask(1) << t;
    }
    return m;
}

}  // namespace

double exact_non_delivery(const OverlayGraph& g, const ForwardProfile& p,
                          const std::vector<NodeId>& targets, const EpidemicCaps& caps) {
    const int n = g.node_count();
    if (n > caps.exact_nodes)
        fail(Errc::TooLarge, "exact mode capped at " + std::to_string(caps.exact_nodes) +
                                 " nodes (got " + std::to_string(n) + ")");
    WaveSolver solver{g, p, n, Mask(1) << n, make_target_mask(g, targets), {}};
    // the outcome weights sum to one analytically; shave rounding dust
    return std::clamp(solver.solve(solver.source_bit, solver.source_bit), 0.0, 1.0);
}

double percolation_non_delivery(const OverlayGraph& g, const ForwardProfile& p,
                                const std::vector<NodeId>& targets, const EpidemicCaps& caps) {
    const int n = g.node_count();
    Mask target_mask = make_target_mask(g, targets);

    // Collect positive-probability edges; only the uncertain ones (p < 1)
    // need enumeration, certain edges are always on.
    struct Edge {
        NodeId from;  // kSourceId for source edges
        NodeId to;
        double prob;
    };
    std::vector<Edge> uncertain;
    std::vector<Edge> certain;
    int positive = 0;
    auto add = [&](NodeId u, NodeId v, double prob) {
        if (prob <= 0.0) return;
        ++positive;
        if (prob >= 1.0)
            certain.push_back({u, v, prob});
        else
            uncertain.push_back({u, v, prob});
    };
    for (NodeId v = 0; v < n; ++v) add(kSourceId, v, p.source[v]);
    for (auto [u, v] : g.edges()) add(u, v, p.node[u][v]);

    if (positive > caps.oracle_edges)
        fail(Errc::TooLarge, "percolation enumeration capped at " + std::to_string(caps.oracle_edges) +
                                 " positive-probability edges (got " + std::to_string(positive) + ")");

    const int m = static_cast<int>(uncertain.size());
    double q = 0.0;
    std::vector<std::vector<NodeId>> succ(n + 1);
    for (std::uint64_t state = 0; state < (std::uint64_t(1) << m); ++state) {
        double prob = 1.0;
        for (auto& adj : succ) adj.clear();
        auto on = [&](const Edge& e) {
            int tail = (e.from == kSourceId) ? n : e.from;
            succ[tail].push_back(e.to);
        };
        for (const Edge& e : certain) on(e);
        for (int b = 0; b < m; ++b) {
            if (state & (std::uint64_t(1) << b)) {
                prob *= uncertain[b].prob;
                on(uncertain[b]);
            } else {
                prob *= 1.0 - uncertain[b].prob;
            }
        }
        if (prob == 0.0) continue;

        Mask reached = 0;
        std::vector<NodeId> stack(succ[n].begin(), succ[n].end());
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            if (reached & (Mask(1) << u)) continue;
            reached |= Mask(1) << u;
            for (NodeId v : succ[u]) stack.push_back(v);
        }
        if ((reached & target_mask) == 0) q += prob;
    }
    return std::clamp(q, 0.0, 1.0);
}

MonteCarloEstimate monte_carlo_non_delivery(const OverlayGraph& g, const ForwardProfile& p,
                                            const std::vector<NodeId>& targets,
                                            long long trials, std::uint64_t seed, int workers) {
    if (trials < 1) fail(Errc::InvalidArgument, "trials must be >= 1");
    if (workers < 1) fail(Errc::InvalidArgument, "workers must be >= 1");
    const int n = g.node_count();
    Mask target_mask = make_target_mask(g, targets);

    // Fixed edge order: source edges then node edges. Drawing all edge
    // outcomes up front keeps trials independent of traversal order, and the
    // per-trial streams make the estimate independent of the partitioning.
    struct Edge {
        NodeId from, to;
        double prob;
    };
    std::vector<Edge> edges;
    for (NodeId v : g.source_targets())
        if (p.source[v] > 0.0) edges.push_back({kSourceId, v, p.source[v]});
    for (auto [u, v] : g.edges())
        if (p.node[u][v] > 0.0) edges.push_back({u, v, p.node[u][v]});

    auto run_range = [&](long long first, long long last) {
        long long misses = 0;
        std::vector<std::vector<NodeId>> succ(n + 1);
        for (long long t = first; t < last; ++t) {
            SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(t));
            for (auto& adj : succ) adj.clear();
            for (const Edge& e : edges) {
                bool alive = e.prob >= 1.0 || rng.next_double() < e.prob;
                if (alive) succ[e.from == kSourceId ? n : e.from].push_back(e.to);
            }
            Mask reached = 0;
            std::vector<NodeId> stack(succ[n].begin(), succ[n].end());
            while (!stack.empty()) {
                NodeId u = stack.back();
                stack.pop_back();
                if (reached & (Mask(1) << u)) continue;
                reached |= Mask(1) << u;
                for (NodeId v : succ[u]) stack.push_back(v);
            }
            if ((reached & target_mask) == 0) ++misses;
        }
        return misses;
    };

    long long misses = 0;
    if (workers == 1) {
        misses = run_range(0, trials);
    } else {
        std::vector<std::future<long long>> parts;
        long long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long long first = w * chunk;
            long long last = std::min(trials, first + chunk);
            if (first >= last) break;
            parts.push_back(std::async(std::launch::async, run_range, first, last));
        }
        for (auto& part : parts) misses += part.get();
    }

    MonteCarloEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.mean = static_cast<double>(misses) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(trials));
    return est;
}

std::pair<double, double> single_impact_ratio(const OverlayGraph& g, const ForwardProfile& p,
                                              NodeId i, NodeId j, double reduced,
                                              const EpidemicCaps& caps) {
    if (!g.has_edge(j, i)) fail(Errc::NotAnEdge, "j must be an in-neighbor of i");
    double original = p.node[j][i];
    if (original >= 1.0) fail(Errc::InvalidArgument, "p_j[i] must be < 1");
    if (reduced >= original || reduced < 0.0)
        fail(Errc::InvalidReduction, "reduced probability must be in [0, p_j[i])");

    double q_before = exact_non_delivery(g, p, {i}, caps);
    ForwardProfile lowered = p;
    lowered.node[j][i] = reduced;
    double q_after = exact_non_delivery(g, lowered, {i}, caps);
    return {q_before, q_after};
}

double ReliabilityCache::non_delivery(const ForwardProfile& p, NodeId target) {
    // FNV-1a over the profile bytes plus the target id. Profiles recur across
    // trajectory stages, so hits dominate in analyzer workloads.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t len) {
        const unsigned char* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= bytes[k];
            h *= 1099511628211ull;
        }
    };
    mix(p.source.data(), p.source.size() * sizeof(double));
    for (const auto& row : p.node) mix(row.data(), row.size() * sizeof(double));
    mix(&target, sizeof(target));

    auto it = cache_.find(h);
    if (it != cache_.end()) return it->second;
    double q = exact_non_delivery(*g_, p, {target}, caps_);
    cache_.emplace(h, q);
    return q;
}

}  // namespace epigame
