#include "epigame/lemma_suites.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>

#include "epigame/analyzer.hpp"
#include "epigame/generators.hpp"

namespace epigame {

namespace {

constexpr double kTightTol = 1e-12;

std::string describe_graph(const OverlayGraph& g) {
    std::ostringstream os;
    os << "n=" << g.node_count() << " edges={";
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        auto [u, v] = g.edges()[k];
        os << (k ? "," : "") << u << "->" << v;
    }
    os << "} sources={";
    for (std::size_t k = 0; k < g.source_targets().size(); ++k)
        os << (k ? "," : "") << g.source_targets()[k];
    os << "}";
    return os.str();
}

// A random simple path from the source to some node, following the BFS tree.
std::vector<NodeId> random_source_path(SplitMix64& rng, const OverlayGraph& g) {
    std::vector<NodeId> parent(g.node_count(), -2);
    std::deque<NodeId> queue;
    for (NodeId t : g.source_targets()) {
        parent[t] = kSourceId;
        queue.push_back(t);
    }
    std::vector<NodeId> reached;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        reached.push_back(u);
        for (NodeId v : g.out_neighbors(u))
            if (parent[v] == -2) {
                parent[v] = u;
                queue.push_back(v);
            }
    }
    NodeId end = reached[rng.next_below(reached.size())];
    std::vector<NodeId> path{end};
    while (parent[path.back()] != kSourceId) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;  // nodes only; the source edge enters path[0]
}

struct Runner {
    const SuiteOptions& opts;
    std::vector<SuiteResult>& results;

    static std::uint64_t name_tag(const std::string& name) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : name) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    void run(const std::string& name, int cases,
             const std::function<bool(SplitMix64&, std::string&)>& one_case) {
        SuiteResult res;
        res.name = name;
        res.cases = cases;
        for (int c = 0; c < cases; ++c) {
            SplitMix64 rng = SplitMix64::stream(opts.seed, name_tag(name) + c);
            std::string note;
            bool ok = false;
            try {
                ok = one_case(rng, note);
            } catch (const std::exception& e) {
                note = std::string("exception: ") + e.what();
            }
            if (!ok) {
                ++res.failures;
                if (res.counterexamples.size() < 3)
                    res.counterexamples.push_back("case " + std::to_string(c) + ": " + note);
            }
        }
        results.push_back(std::move(res));
    }
};

// ---- epidemic identities -------------------------------------------------

bool case_deterministic_delivery(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.0, 1.0);
    std::vector<NodeId> path = random_source_path(rng, g);
    p.source[path[0]] = 1.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) p.node[path[k]][path[k + 1]] = 1.0;
    double q = exact_non_delivery(g, p, {path.back()});
    if (q == 0.0) return true;
    note = describe_graph(g) + " q=" + std::to_string(q) + " (expected exactly 0)";
    return false;
}

bool case_positive_path(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.0, 1.0);
    std::vector<NodeId> path = random_source_path(rng, g);
    p.source[path[0]] = std::max(p.source[path[0]], 0.05);
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
        p.node[path[k]][path[k + 1]] = std::max(p.node[path[k]][path[k + 1]], 0.05);
    double q = exact_non_delivery(g, p, {path.back()});
    if (q < 1.0) return true;
    note = describe_graph(g) + " q=1 despite an all-positive path";
    return false;
}

bool case_isolated_node(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.0, 1.0);
    NodeId i = static_cast<NodeId>(rng.next_below(g.node_count()));
    p.source[i] = 0.0;
    for (NodeId j : g.in_neighbors(i)) p.node[j][i] = 0.0;
    double q = exact_non_delivery(g, p, {i});
    if (q == 1.0) return true;
    note = describe_graph(g) + " node " + std::to_string(i) + " q=" + std::to_string(q) +
           " (expected exactly 1)";
    return false;
}

bool case_off_path_invariance(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.0, 1.0);
    NodeId i = static_cast<NodeId>(rng.next_below(g.node_count()));
    ForwardProfile perturbed = p;
    bool changed = false;
    for (NodeId k = 0; k < g.node_count(); ++k) {
        if (k == i || g.lies_on_source_path(k, i)) continue;
        for (NodeId j : g.out_neighbors(k)) {
            perturbed.node[k][j] = rng.next_double();
            changed = true;
        }
    }
    if (!changed) return true;  // vacuous draw
    double q0 = exact_non_delivery(g, p, {i});
    double q1 = exact_non_delivery(g, perturbed, {i});
    if (std::abs(q0 - q1) <= kTightTol) return true;
    note = describe_graph(g) + " node " + std::to_string(i) + " |dq|=" + std::to_string(std::abs(q0 - q1));
    return false;
}

bool case_single_punisher_bound(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.05, 0.95);
    if (g.edges().empty()) return true;
    auto [j, i] = g.edges()[rng.next_below(g.edges().size())];
    double reduced = p.node[j][i] * rng.next_double();
    auto [q, q_reduced] = single_impact_ratio(g, p, i, j, reduced);
    double bound = q * (1.0 - reduced) / (1.0 - p.node[j][i]);
    if (q_reduced <= bound + kTightTol) return true;
    note = describe_graph(g) + " q'=" + std::to_string(q_reduced) + " bound=" + std::to_string(bound);
    return false;
}

bool case_recursion_vs_percolation(SplitMix64& rng, std::string& note) {
    GraphGenOptions small;
    small.min_nodes = 2;
    small.max_nodes = 5;
    OverlayGraph g = random_graph(rng, small);
    ForwardProfile p = random_profile_grid(rng, g, {0.0, 0.3, 0.7, 1.0});
    NodeId i = static_cast<NodeId>(rng.next_below(g.node_count()));
    double a = exact_non_delivery(g, p, {i});
    double b = percolation_non_delivery(g, p, {i});
    if (std::abs(a - b) <= kTightTol) return true;
    note = describe_graph(g) + " wave=" + std::to_string(a) + " percolation=" + std::to_string(b);
    return false;
}

bool case_monotonicity(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.0, 0.9);
    NodeId i = static_cast<NodeId>(rng.next_below(g.node_count()));
    ForwardProfile raised = p;
    if (!g.edges().empty() && rng.next_double() < 0.8) {
        auto [u, v] = g.edges()[rng.next_below(g.edges().size())];
        raised.node[u][v] = std::min(1.0, raised.node[u][v] + 0.3);
    } else {
        NodeId t = g.source_targets()[rng.next_below(g.source_targets().size())];
        raised.source[t] = std::min(0.999, raised.source[t] + 0.3);
    }
    double q0 = exact_non_delivery(g, p, {i});
    double q1 = exact_non_delivery(g, raised, {i});
    if (q1 <= q0 + kTightTol) return true;
    note = describe_graph(g) + " raising a probability increased q of node " + std::to_string(i);
    return false;
}

bool case_mc_determinism(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ForwardProfile p = random_profile_range(rng, g, 0.0, 1.0);
    NodeId i = static_cast<NodeId>(rng.next_below(g.node_count()));
    std::uint64_t seed = rng.next_u64();
    auto a = monte_carlo_non_delivery(g, p, {i}, 500, seed);
    auto b = monte_carlo_non_delivery(g, p, {i}, 500, seed);
    if (a.mean == b.mean && a.std_error == b.std_error) return true;
    note = "same seed produced different estimates";
    return false;
}

// ---- defection-set closed forms -------------------------------------------

std::string describe_records(const std::vector<DefectionRecord>& recs) {
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < recs.size(); ++k)
        os << (k ? "," : "") << "(" << recs[k].accused << "," << recs[k].victim << ","
           << recs[k].age << ")";
    os << "}";
    return os.str();
}

SignalVerdict random_defect_signal(SplitMix64& rng, const OverlayGraph& g, double defect_prob) {
    SignalVerdict s(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) s.defect[e] = rng.next_double() < defect_prob;
    return s;
}

ReactionSetConfig random_rs(SplitMix64& rng) {
    ReactionSetConfig rs;
    rs.mode = rng.next_double() < 0.5 ? ReactionSetConfig::Mode::Direct
                                      : ReactionSetConfig::Mode::FullIndirect;
    return rs;
}

bool case_ds_quiet_shift(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ReactionSetConfig rs = random_rs(rng);
    int tau = 1 + static_cast<int>(rng.next_below(5));
    DurationPolicy dur = DurationPolicy::uniform(tau);

    PunishState state(g.node_count());
    state = update_ds_public(state, random_defect_signal(rng, g, 0.4), rs, dur, g);
    PunishState start = state;

    int r = 1 + static_cast<int>(rng.next_below(std::max(tau - 1, 1)));
    SignalVerdict quiet(g.edge_count());
    for (int k = 0; k < r; ++k) state = update_ds_public(state, quiet, rs, dur, g);

    for (auto [u, v] : g.edges()) {
        std::vector<DefectionRecord> expected;
        for (DefectionRecord rec : start.records(u, v)) {
            rec.age += r;
            if (rec.age < tau) expected.push_back(rec);
        }
        std::sort(expected.begin(), expected.end());
        if (state.records(u, v) != expected) {
            note = describe_graph(g) + " pair (" + std::to_string(u) + "," + std::to_string(v) +
                   ") got " + describe_records(state.records(u, v)) + " expected " +
                   describe_records(expected);
            return false;
        }
    }
    return true;
}

bool case_ds_deviation_superposition(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ReactionSetConfig rs = random_rs(rng);
    int tau = 1 + static_cast<int>(rng.next_below(5));
    DurationPolicy dur = DurationPolicy::uniform(tau);

    PunishState state(g.node_count());
    state = update_ds_public(state, random_defect_signal(rng, g, 0.3), rs, dur, g);

    SignalVerdict deviation = random_defect_signal(rng, g, 0.3);
    SignalVerdict quiet(g.edge_count());

    int r = 1 + static_cast<int>(rng.next_below(tau));
    PunishState with_dev = update_ds_public(state, deviation, rs, dur, g);
    PunishState without_dev = update_ds_public(state, quiet, rs, dur, g);
    for (int k = 1; k < r; ++k) {
        with_dev = update_ds_public(with_dev, quiet, rs, dur, g);
        without_dev = update_ds_public(without_dev, quiet, rs, dur, g);
    }

    for (auto [u, v] : g.edges()) {
        std::vector<DefectionRecord> expected = without_dev.records(u, v);
        if (r - 1 < tau) {
            for (int e = 0; e < g.edge_count(); ++e) {
                if (!deviation.defect[e]) continue;
                auto [k1, k2] = g.edges()[e];
                if (rs.contains(g, k1, k2, u) && rs.contains(g, k1, k2, v)) {
                    DefectionRecord rec{k1, k2, r - 1};
                    auto it = std::lower_bound(expected.begin(), expected.end(), rec);
                    if (it == expected.end() || *it != rec) expected.insert(it, rec);
                }
            }
        }
        if (with_dev.records(u, v) != expected) {
            note = describe_graph(g) + " pair (" + std::to_string(u) + "," + std::to_string(v) +
                   ") after r=" + std::to_string(r) + " got " +
                   describe_records(with_dev.records(u, v)) + " expected " +
                   describe_records(expected);
            return false;
        }
    }
    return true;
}

bool case_ds_expiry(SplitMix64& rng, std::string& note) {
    OverlayGraph g = random_graph(rng);
    ReactionSetConfig rs = random_rs(rng);
    int tau = 1 + static_cast<int>(rng.next_below(5));
    DurationPolicy dur = DurationPolicy::uniform(tau);

    PunishState state(g.node_count());
    state = update_ds_public(state, random_defect_signal(rng, g, 0.5), rs, dur, g);
    SignalVerdict quiet(g.edge_count());
    for (int k = 0; k < tau; ++k) state = update_ds_public(state, quiet, rs, dur, g);
    if (state.empty()) return true;
    for (auto [u, v] : g.edges())
        if (!state.records(u, v).empty()) {
            note = describe_graph(g) + " tau=" + std::to_string(tau) + " pair (" + std::to_string(u) +
                   "," + std::to_string(v) + ") still holds " + describe_records(state.records(u, v)) +
                   " after " + std::to_string(tau) + " quiet stages";
            return false;
        }
    note = "source pair still holds records after tau quiet stages";
    return false;
}

bool case_private_ds_window(SplitMix64& rng, std::string& note) {
    ScenarioGenOptions opts;
    opts.graph.max_nodes = 6;
    Scenario sc = random_private_scenario(rng, opts);
    const OverlayGraph& g = sc.graph;
    const DelayMatrix& delays = *sc.delays;
    if (g.edge_count() == 0) return true;

    int e = static_cast<int>(rng.next_below(g.edge_count()));
    auto [k1, k2] = g.edges()[e];
    std::vector<DefectionEvent> log{{k1, k2, 0}};

    int horizon = 2;
    for (NodeId a = 0; a < g.node_count(); ++a) {
        int d = delays.get(a, e);
        if (d != kInfiniteDelay) horizon = std::max(horizon, d + sc.durations.duration(e, a, a) + 2);
        for (NodeId b = 0; b < g.node_count(); ++b)
            if (a != b) {
                int db = delays.get(b, e);
                if (d != kInfiniteDelay && db != kInfiniteDelay)
                    horizon = std::max(horizon, std::max(d, db) + sc.durations.duration(e, a, b) + 2);
            }
    }

    PunishState state(g.node_count());
    for (int stage = 0; stage < horizon; ++stage) {
        std::vector<SignalVerdict> signals;
        for (NodeId k = 0; k < g.node_count(); ++k)
            signals.push_back(private_signal(g, k, log, stage, delays));
        state = update_ds_private(state, signals, delays, sc.durations, g);
        int r = stage + 1;  // state now governs stage r

        for (NodeId u = 0; u < g.node_count(); ++u) {
            std::vector<NodeId> peers(g.out_neighbors(u));
            for (NodeId p : g.in_neighbors(u))
                if (!g.has_edge(u, p)) peers.push_back(p);
            for (NodeId v : peers) {
                int del_u = delays.get(u, e);
                int del_v = delays.get(v, e);
                std::vector<DefectionRecord> expected;
                if (del_u != kInfiniteDelay && del_v != kInfiniteDelay) {
                    int start_age = std::min(del_u - del_v, 0);
                    int dur = sc.durations.duration(e, u, v);
                    if (r >= del_u + 1 && (dur == kInfiniteDelay || r <= del_u + dur - start_age))
                        expected.push_back({k1, k2, r - 1 - del_u + start_age});
                }
                if (state.records(u, v) != expected) {
                    note = describe_graph(g) + " defection " + std::to_string(k1) + "->" +
                           std::to_string(k2) + " stage r=" + std::to_string(r) + " pair (" +
                           std::to_string(u) + "," + std::to_string(v) + ") got " +
                           describe_records(state.records(u, v)) + " expected " +
                           describe_records(expected);
                    return false;
                }
            }
        }
    }
    return true;
}

bool threshold_zero_from(const std::vector<DefectionRecord>& recs, NodeId forwarder, NodeId receiver) {
    for (const DefectionRecord& rec : recs) {
        if (rec.age < 0) continue;
        if (rec.accused == forwarder || rec.accused == receiver) return true;
    }
    return false;
}

bool case_private_threshold_agreement(SplitMix64& rng, std::string& note) {
    ScenarioGenOptions opts;
    opts.graph.max_nodes = 6;
    Scenario sc = random_private_scenario(rng, opts);
    const OverlayGraph& g = sc.graph;

    NodeId deviator = static_cast<NodeId>(rng.next_below(g.node_count()));
    if (g.out_neighbors(deviator).empty()) return true;
    DropDeviation dev{deviator, {g.out_neighbors(deviator)[rng.next_below(g.out_neighbors(deviator).size())]}, 0};

    int mdel = 0;
    for (NodeId i = 0; i < g.node_count(); ++i) mdel = std::max(mdel, sc.mdel(i));
    int horizon = 3 * (mdel + sc.durations.base_tau()) + 2;

    Trajectory traj = evolve(sc, dev, horizon);
    // Re-run the punish states to compare both holders' views per stage.
    PunishState state(g.node_count());
    for (int stage = 0; stage < horizon; ++stage) {
        std::vector<SignalVerdict> signals;
        for (NodeId k = 0; k < g.node_count(); ++k)
            signals.push_back(private_signal(g, k, traj.events, stage, *sc.delays));
        state = update_ds_private(state, signals, *sc.delays, sc.durations, g);
        for (auto [u, v] : g.edges()) {
            bool from_u = threshold_zero_from(state.records(u, v), u, v);
            bool from_v = threshold_zero_from(state.records(v, u), u, v);
            if (from_u != from_v) {
                note = describe_graph(g) + " stage " + std::to_string(stage + 1) + " edge (" +
                       std::to_string(u) + "," + std::to_string(v) +
                       ") holders disagree: " + describe_records(state.records(u, v)) + " vs " +
                       describe_records(state.records(v, u));
                return false;
            }
        }
    }
    return true;
}

// ---- truncation and coordination ------------------------------------------

bool case_public_truncation(SplitMix64& rng, std::string& note) {
    ScenarioGenOptions opts;
    opts.graph.max_nodes = 6;
    Scenario sc = random_public_scenario(rng, opts);
    NodeId i = static_cast<NodeId>(rng.next_below(sc.graph.node_count()));
    if (sc.graph.out_neighbors(i).empty()) return true;

    HistorySeed empty;
    std::vector<NodeId> droppable = droppable_neighbors(sc, empty, i);
    if (droppable.empty()) return true;
    DropDeviation dev{i, {droppable[rng.next_below(droppable.size())]}, 0};

    ReliabilityCache cache(sc.graph, sc.options.caps);
    MarginCase mc = build_margin_case(sc, empty, dev, cache);
    int tau = sc.durations.base_tau();
    if (mc.has_tail || static_cast<int>(mc.benefit_coeff.size()) > tau + 1) {
        note = describe_graph(sc.graph) + " tau=" + std::to_string(tau) + " margin spans " +
               std::to_string(mc.benefit_coeff.size()) + " stages";
        return false;
    }
    return true;
}

bool case_private_overlap(SplitMix64& rng, std::string& note) {
    ScenarioGenOptions opts;
    opts.graph.max_nodes = 6;
    Scenario sc = random_private_scenario(rng, opts);
    const OverlayGraph& g = sc.graph;
    NodeId i = static_cast<NodeId>(rng.next_below(g.node_count()));
    if (g.out_neighbors(i).empty() || g.in_neighbors(i).empty()) return true;

    DropDeviation dev{i, g.out_neighbors(i), 0};
    int mdel = sc.mdel(i);
    int tau = sc.durations.base_tau();
    int horizon = mdel + tau + 3;
    Trajectory traj = evolve(sc, dev, horizon);
    Trajectory clean = evolve(sc, std::nullopt, horizon);

    for (int r = mdel + 1; r <= mdel + tau; ++r) {
        for (NodeId k : g.in_neighbors(i))
            if (traj.stages[r].profile.node[k][i] != 0.0) {
                note = describe_graph(g) + " in-neighbor " + std::to_string(k) +
                       " not punishing deviator " + std::to_string(i) + " at stage " + std::to_string(r);
                return false;
            }
    }
    for (int r = mdel + tau + 1; r < horizon; ++r) {
        if (traj.stages[r].profile == clean.stages[r].profile) continue;
        note = describe_graph(g) + " thresholds not back to baseline at stage " + std::to_string(r);
        return false;
    }
    return true;
}

bool case_sandwich_small(SplitMix64& rng, std::string& note) {
    ScenarioGenOptions opts;
    opts.graph.min_nodes = 2;
    opts.graph.max_nodes = 4;
    opts.graph.reverse_edge_prob = 0.8;
    opts.force_full_indirect = true;
    Scenario sc = random_public_scenario(rng, opts);
    sc.options.offsets = {1};
    sc.options.history_depth = 1;

    HistoryFamily family = HistoryFamily::standard(sc);
    double folk = folk_upper_bound(sc);
    double threshold = effectiveness_threshold(sc, family);
    IndirectBoundDetail detail;
    double sufficient = indirect_sufficient_ratio(sc, &detail);
    double slack = std::max(1e-9, 2e-6 * threshold);
    if (!std::isfinite(threshold)) {
        note = "threshold unattainable on a full-indirect public scenario";
        return false;
    }
    if (threshold < folk - slack) {
        note = "threshold " + std::to_string(threshold) + " below folk bound " + std::to_string(folk);
        return false;
    }
    if (std::isfinite(sufficient) && threshold > sufficient + slack) {
        note = "threshold " + std::to_string(threshold) + " above sufficient bound " +
               std::to_string(sufficient);
        return false;
    }
    return true;
}

}  // namespace

std::vector<SuiteResult> run_lemma_suites(const SuiteOptions& opts) {
    testing::set_ds_expiry_fault(opts.inject_ds_expiry_fault);

    std::vector<SuiteResult> results;
    Runner runner{opts, results};
    const int n = opts.cases;
    auto scaled = [&](int div) { return std::max(n / div, n > 0 ? 1 : 0); };

    runner.run("deterministic_delivery", n, case_deterministic_delivery);
    runner.run("positive_path_reliability", n, case_positive_path);
    runner.run("isolated_node_no_delivery", n, case_isolated_node);
    runner.run("off_path_invariance", n, case_off_path_invariance);
    runner.run("single_punisher_bound", n, case_single_punisher_bound);
    runner.run("recursion_vs_percolation", n, case_recursion_vs_percolation);
    runner.run("reliability_monotonicity", n, case_monotonicity);
    runner.run("mc_determinism", scaled(10), case_mc_determinism);
    runner.run("ds_quiet_shift", n, case_ds_quiet_shift);
    runner.run("ds_deviation_superposition", n, case_ds_deviation_superposition);
    runner.run("ds_expiry", n, case_ds_expiry);
    runner.run("private_ds_window", scaled(2), case_private_ds_window);
    runner.run("private_threshold_agreement", scaled(4), case_private_threshold_agreement);
    runner.run("public_margin_truncation", scaled(2), case_public_truncation);
    runner.run("private_punishment_overlap", scaled(4), case_private_overlap);
    runner.run("bound_sandwich", scaled(40), case_sandwich_small);

    testing::set_ds_expiry_fault(false);
    return results;
}

}  // namespace epigame
