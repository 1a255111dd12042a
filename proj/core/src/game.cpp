#include "epigame/game.hpp"

#include <algorithm>
#include <cmath>

namespace epigame {

UtilityParams UtilityParams::uniform(int n, double beta, double gamma, double omega) {
    UtilityParams p;
    p.beta.assign(n, beta);
    p.gamma.assign(n, gamma);
    p.omega.assign(n, omega);
    return p;
}

void UtilityParams::validate(int n) const {
    if (static_cast<int>(beta.size()) != n || static_cast<int>(gamma.size()) != n ||
        static_cast<int>(omega.size()) != n)
        fail(Errc::InvalidArgument, "utility parameter vectors must match the node count");
    for (int i = 0; i < n; ++i) {
        if (beta[i] < 0.0) fail(Errc::InvalidArgument, "beta must be >= 0");
        if (gamma[i] <= 0.0) fail(Errc::InvalidArgument, "gamma must be > 0");
        if (omega[i] <= 0.0 || omega[i] >= 1.0) fail(Errc::InvalidArgument, "omega must be in (0,1)");
    }
}

void Scenario::validate() const {
    validate_baseline_profile(graph, baseline);
    params.validate(graph.node_count());
    if (monitoring == MonitoringMode::Private && !delays)
        fail(Errc::InvalidArgument, "private monitoring requires a delay matrix");
}

int Scenario::mdel(NodeId i) const {
    if (monitoring == MonitoringMode::Public || !delays) return 0;
    return max_accusation_delay(graph, *delays, i);
}

double stage_utility(double q_i, double pbar_i, const UtilityParams& params, NodeId i) {
    if (q_i < 0.0 || q_i > 1.0) fail(Errc::InvalidArgument, "q must be in [0,1]");
    return (1.0 - q_i) * (params.beta[i] - params.gamma[i] * pbar_i);
}

namespace {

// Drives one deterministic run of the repeated game: thresholds from the
// punish state, optional injected drops, signals, state update.
struct Engine {
    const Scenario& sc;
    PunishState ds;
    std::vector<DefectionEvent> log;
    int stage = 0;

    explicit Engine(const Scenario& s) : sc(s), ds(s.graph.node_count()) {}

    ForwardProfile thresholds() const { return threshold_profile(ds, sc.baseline, sc.graph); }

    // Plays one stage, applying any deviations scheduled for it, and returns
    // the played profile.
    ForwardProfile step(const std::vector<const DropDeviation*>& devs) {
        const OverlayGraph& g = sc.graph;
        ForwardProfile thr = thresholds();
        ForwardProfile played = thr;
        for (const DropDeviation* dev : devs)
            for (NodeId j : dev->dropped) played.node[dev->deviator][j] = 0.0;

        for (auto [u, v] : g.edges())
            if (played.node[u][v] < thr.node[u][v]) log.push_back({u, v, stage});

        if (sc.monitoring == MonitoringMode::Public) {
            ds = update_ds_public(ds, public_signal(g, thr, played), sc.rs, sc.durations, g);
        } else {
            std::vector<SignalVerdict> signals;
            signals.reserve(g.node_count());
            for (NodeId k = 0; k < g.node_count(); ++k)
                signals.push_back(private_signal(g, k, log, stage, *sc.delays));
            ds = update_ds_private(ds, signals, *sc.delays, sc.durations, g);
        }
        ++stage;
        return played;
    }

    void run_seed(const HistorySeed& seed) {
        for (int t = 0; t < seed.length; ++t) {
            std::vector<const DropDeviation*> devs;
            for (const DropDeviation& d : seed.deviations)
                if (d.at_stage == t) devs.push_back(&d);
            step(devs);
        }
    }
};

double pbar_of(const OverlayGraph& g, const ForwardProfile& played, NodeId i) {
    double s = 0.0;
    for (NodeId j : g.out_neighbors(i)) s += played.node[i][j];
    return s;
}

// Stage index after which no pending accusation can still arrive or activate
// for any event in the log. Beyond it, grim states only age uniformly and
// finite-duration states shed deviation records.
int settle_bound(const Scenario& sc, const std::vector<DefectionEvent>& log) {
    const OverlayGraph& g = sc.graph;
    int bound = 0;
    for (const DefectionEvent& ev : log) {
        if (sc.monitoring == MonitoringMode::Public) {
            bound = std::max(bound, ev.stage + 1);
            continue;
        }
        int e = g.edge_index(ev.accused, ev.victim);
        for (NodeId a = 0; a < g.node_count(); ++a) {
            int del_a = sc.delays->get(a, e);
            if (del_a == kInfiniteDelay) continue;
            std::vector<NodeId> peers(g.out_neighbors(a));
            for (NodeId p : g.in_neighbors(a))
                if (!g.has_edge(a, p)) peers.push_back(p);
            for (NodeId b : peers) {
                int del_b = sc.delays->get(b, e);
                if (del_b == kInfiniteDelay) continue;
                bound = std::max(bound, ev.stage + std::max(del_a, del_b) + 1);
            }
        }
    }
    return bound;
}

int max_finite_duration(const Scenario& sc) {
    if (sc.durations.is_grim()) return 0;
    int worst = sc.durations.base_tau();
    const OverlayGraph& g = sc.graph;
    if (sc.durations.has_pair_table()) {
        for (int e = 0; e < g.edge_count(); ++e)
            for (NodeId a = 0; a < g.node_count(); ++a)
                for (NodeId b = 0; b < g.node_count(); ++b)
                    if (a != b) worst = std::max(worst, sc.durations.duration(e, a, b));
    }
    return worst;
}

}  // namespace

Trajectory evolve(const Scenario& sc, const std::optional<DropDeviation>& deviation, int horizon) {
    if (horizon < 1) fail(Errc::InvalidArgument, "horizon must be >= 1");
    sc.validate();

    ReliabilityCache cache(sc.graph, sc.options.caps);
    Engine engine(sc);
    Trajectory traj;
    const int n = sc.graph.node_count();

    for (int t = 0; t < horizon; ++t) {
        std::vector<const DropDeviation*> devs;
        if (deviation && deviation->at_stage == t) devs.push_back(&*deviation);
        ForwardProfile played = engine.step(devs);

        StageOutcome out;
        out.q.resize(n);
        out.pbar.resize(n);
        out.u.resize(n);
        for (NodeId i = 0; i < n; ++i) {
            out.q[i] = cache.non_delivery(played, i);
            out.pbar[i] = pbar_of(sc.graph, played, i);
            out.u[i] = stage_utility(out.q[i], out.pbar[i], sc.params, i);
        }
        out.profile = std::move(played);
        traj.stages.push_back(std::move(out));
    }
    traj.events = engine.log;
    return traj;
}

ForwardProfile thresholds_after(const Scenario& sc, const HistorySeed& seed) {
    Engine engine(sc);
    engine.run_seed(seed);
    return engine.thresholds();
}

PunishState state_after(const Scenario& sc, const HistorySeed& seed) {
    Engine engine(sc);
    engine.run_seed(seed);
    return engine.ds;
}

HistorySeed believed_prefix(const Scenario& sc, const HistorySeed& seed, NodeId observer) {
    if (sc.monitoring == MonitoringMode::Public) return seed;

    // Re-simulate to learn which defections actually happened, then keep the
    // ones the observer has been informed of by the end of the prefix. The
    // belief system puts point mass on the history containing exactly those.
    Engine engine(sc);
    engine.run_seed(seed);

    HistorySeed believed;
    believed.length = seed.length;
    believed.label = seed.label + "|believed-by-" + std::to_string(observer);
    for (const DefectionEvent& ev : engine.log) {
        int del = delay_of(sc.graph, *sc.delays, observer, ev.accused, ev.victim);
        if (del == kInfiniteDelay || ev.stage + del > seed.length - 1) continue;
        bool merged = false;
        for (DropDeviation& d : believed.deviations)
            if (d.deviator == ev.accused && d.at_stage == ev.stage) {
                d.dropped.push_back(ev.victim);
                merged = true;
                break;
            }
        if (!merged) believed.deviations.push_back({ev.accused, {ev.victim}, ev.stage});
    }
    return believed;
}

std::vector<NodeId> droppable_neighbors(const Scenario& sc, const HistorySeed& seed, NodeId i) {
    HistorySeed prefix = believed_prefix(sc, seed, i);
    ForwardProfile thr = thresholds_after(sc, prefix);
    std::vector<NodeId> out;
    for (NodeId j : sc.graph.out_neighbors(i))
        if (thr.node[i][j] > 0.0) out.push_back(j);
    return out;
}

double MarginCase::margin(double beta, double gamma, double omega) const {
    double acc = 0.0, w = 1.0;
    const std::size_t count = benefit_coeff.size();
    for (std::size_t r = 0; r < count; ++r) {
        acc += w * (beta * benefit_coeff[r] + gamma * cost_coeff[r]);
        if (r + 1 < count || has_tail) w *= omega;
    }
    if (has_tail && count > 0)
        acc += (w / (1.0 - omega)) * (beta * benefit_coeff.back() + gamma * cost_coeff.back());
    return acc;
}

double MarginCase::margin(const UtilityParams& params) const {
    return margin(params.beta[deviator], params.gamma[deviator], params.omega[deviator]);
}

MarginCase build_margin_case(const Scenario& sc, const HistorySeed& seed,
                             const DropDeviation& deviation, ReliabilityCache& cache) {
    const OverlayGraph& g = sc.graph;
    const NodeId i = deviation.deviator;
    if (deviation.dropped.empty()) fail(Errc::InvalidArgument, "drop set must be non-empty");

    HistorySeed prefix = believed_prefix(sc, seed, i);
    Engine base(sc);
    base.run_seed(prefix);

    ForwardProfile thr = base.thresholds();
    for (NodeId j : deviation.dropped) {
        if (!g.has_edge(i, j)) fail(Errc::NotAnEdge, "dropped node is not an out-neighbor");
        if (thr.node[i][j] <= 0.0)
            fail(Errc::InvalidArgument,
                 "illegal deviation: threshold toward node " + std::to_string(j) + " is already 0");
    }

    Engine follow = base;   // sigma*: everyone keeps to the strategy
    Engine deviate = base;  // sigma': i drops D now, strategy afterwards

    MarginCase mc;
    mc.history = seed.label;
    mc.deviator = i;
    mc.dropped = deviation.dropped;

    const DropDeviation now{i, deviation.dropped, prefix.length};
    int pending = 0;  // recomputed once the deviation events exist
    for (int r = 0;; ++r) {
        if (r > 0 && follow.stage > pending) {
            // All accusations have arrived and activated. Under a finite
            // duration, equal states mean every later difference is exactly
            // zero; under grim trigger both continuations are stationary and
            // the last recorded stage repeats forever.
            if (sc.durations.is_grim()) {
                mc.has_tail = true;
                break;
            }
            if (follow.ds == deviate.ds) break;
            if (follow.stage > pending + 4 * (max_finite_duration(sc) + 2) + 16)
                fail(Errc::InvalidArgument, "margin evaluation failed to settle (internal bound)");
        }
        std::vector<const DropDeviation*> dev_now;
        if (r == 0) dev_now.push_back(&now);
        ForwardProfile played_star = follow.step({});
        ForwardProfile played_dev = deviate.step(dev_now);
        if (r == 0) pending = settle_bound(sc, deviate.log);

        double q_star = cache.non_delivery(played_star, i);
        double q_dev = cache.non_delivery(played_dev, i);
        double pbar_star = pbar_of(g, played_star, i);
        double pbar_dev = pbar_of(g, played_dev, i);
        mc.benefit_coeff.push_back(q_dev - q_star);
        mc.cost_coeff.push_back((1.0 - q_dev) * pbar_dev - (1.0 - q_star) * pbar_star);
    }
    return mc;
}

double discounted_difference(const Scenario& sc, const HistorySeed& seed,
                             const DropDeviation& deviation) {
    ReliabilityCache cache(sc.graph, sc.options.caps);
    MarginCase mc = build_margin_case(sc, seed, deviation, cache);
    return mc.margin(sc.params);
}

std::vector<std::pair<double, double>> continuation_stats(const Scenario& sc,
                                                          const HistorySeed& seed, NodeId i,
                                                          int stages, ReliabilityCache& cache) {
    Engine engine(sc);
    engine.run_seed(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(stages);
    for (int r = 0; r < stages; ++r) {
        ForwardProfile played = engine.step({});
        out.emplace_back(cache.non_delivery(played, i), pbar_of(sc.graph, played, i));
    }
    return out;
}

std::pair<double, double> stationary_stats(const Scenario& sc, const HistorySeed& seed, NodeId i,
                                           ReliabilityCache& cache) {
    Engine engine(sc);
    engine.run_seed(seed);
    int bound = settle_bound(sc, engine.log);
    if (!sc.durations.is_grim()) bound += max_finite_duration(sc) + 1;
    ForwardProfile played;
    do {
        played = engine.step({});
    } while (engine.stage <= bound + 1);
    return {cache.non_delivery(played, i), pbar_of(sc.graph, played, i)};
}

}  // namespace epigame
