#include "epigame/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace epigame {

namespace {

std::string drop_label(NodeId i, const std::vector<NodeId>& dropped) {
    std::ostringstream os;
    os << "drop(" << i << ":";
    for (std::size_t k = 0; k < dropped.size(); ++k) os << (k ? "," : "") << dropped[k];
    os << ")";
    return os.str();
}

int scenario_tau(const Scenario& sc) {
    return sc.durations.is_grim() ? kInfiniteDelay : sc.durations.base_tau();
}

}  // namespace

HistoryFamily HistoryFamily::standard(const Scenario& sc) {
    const OverlayGraph& g = sc.graph;
    HistoryFamily fam;
    std::set<std::string> labels;
    auto add = [&](HistorySeed seed) {
        if (labels.insert(seed.label).second) fam.seeds.push_back(std::move(seed));
    };

    add(HistorySeed{});  // empty history

    std::vector<int> offsets = sc.options.offsets;
    if (offsets.empty()) offsets = {1};

    for (NodeId i = 0; i < g.node_count(); ++i) {
        const auto& out = g.out_neighbors(i);
        if (out.empty()) continue;
        std::vector<std::vector<NodeId>> drops;
        drops.push_back(out);  // full drop
        for (NodeId j : out) drops.push_back({j});
        for (const auto& d : drops)
            for (int off : offsets) {
                HistorySeed seed;
                seed.deviations.push_back({i, d, 0});
                seed.length = off;
                seed.label = drop_label(i, d) + "@0+" + std::to_string(off);
                add(std::move(seed));
            }
    }

    if (sc.options.history_depth >= 2) {
        for (NodeId a = 0; a < g.node_count(); ++a) {
            if (g.out_neighbors(a).empty()) continue;
            for (NodeId b = 0; b < g.node_count(); ++b) {
                if (b == a || g.out_neighbors(b).empty()) continue;
                HistorySeed seed;
                seed.deviations.push_back({a, g.out_neighbors(a), 0});
                seed.deviations.push_back({b, g.out_neighbors(b), 1});
                seed.length = 2;
                seed.label = "stack(" + std::to_string(a) + "," + std::to_string(b) + ")";
                add(std::move(seed));
            }
        }
    }

    // Aligned-punishment worst cases: simultaneous defections by everyone
    // except the prospective deviator (and, in the second variant, except its
    // out-neighborhood, which keeps the deviator's own thresholds intact
    // while its upstream is punished).
    for (NodeId i = 0; i < g.node_count(); ++i) {
        for (int variant = 0; variant < 2; ++variant) {
            HistorySeed seed;
            for (NodeId k = 0; k < g.node_count(); ++k) {
                if (k == i || g.out_neighbors(k).empty()) continue;
                if (variant == 1 && g.has_edge(i, k)) continue;
                seed.deviations.push_back({k, g.out_neighbors(k), 0});
            }
            if (seed.deviations.empty()) continue;
            seed.length = 1;
            seed.label = (variant == 0 ? "aligned-except-" : "aligned-upstream-") + std::to_string(i);
            add(std::move(seed));
        }
    }
    return fam;
}

namespace {

std::vector<std::vector<NodeId>> enumerate_drop_sets(const std::vector<NodeId>& droppable) {
    std::vector<std::vector<NodeId>> sets;
    const int m = static_cast<int>(droppable.size());
    if (m == 0) return sets;
    if (m <= 12) {
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            std::vector<NodeId> d;
            for (int b = 0; b < m; ++b)
                if (mask & (1u << b)) d.push_back(droppable[b]);
            sets.push_back(std::move(d));
        }
    } else {
        for (NodeId j : droppable) sets.push_back({j});
        sets.push_back(droppable);
    }
    return sets;
}

std::vector<MarginCase> build_all_cases(const Scenario& sc, const HistoryFamily& family,
                                        ReliabilityCache& cache) {
    std::vector<MarginCase> cases;
    for (const HistorySeed& seed : family.seeds) {
        for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
            std::vector<NodeId> droppable = droppable_neighbors(sc, seed, i);
            for (auto& d : enumerate_drop_sets(droppable))
                cases.push_back(build_margin_case(sc, seed, DropDeviation{i, d, 0}, cache));
        }
    }
    return cases;
}

EquilibriumReport report_from_cases(const Scenario& sc, std::vector<MarginCase> cases) {
    EquilibriumReport rep;
    rep.bounds["folk"] = folk_upper_bound(sc);

    std::sort(cases.begin(), cases.end(), [](const MarginCase& a, const MarginCase& b) {
        return std::tie(a.history, a.deviator, a.dropped) < std::tie(b.history, b.deviator, b.dropped);
    });
    double worst = std::numeric_limits<double>::infinity();
    for (const MarginCase& mc : cases) {
        MarginEntry entry{mc.history, mc.deviator, mc.dropped, mc.margin(sc.params)};
        if (entry.margin < worst) {
            worst = entry.margin;
            rep.worst = entry;
        }
        rep.margins.push_back(std::move(entry));
    }
    if (cases.empty()) {
        rep.verdict = EquilibriumReport::Verdict::Inconclusive;
        rep.notes.push_back("no legal deviations in the family; verdict vacuous");
        return rep;
    }
    rep.verdict = worst >= -sc.options.margin_tolerance ? EquilibriumReport::Verdict::Pass
                                                        : EquilibriumReport::Verdict::Fail;
    rep.notes.push_back("verdict holds on the checked history family");
    return rep;
}

}  // namespace

EquilibriumReport dc_check(const Scenario& sc, const HistoryFamily& family) {
    sc.validate();
    if (sc.monitoring != MonitoringMode::Public)
        fail(Errc::InvalidArgument, "dc_check requires public monitoring");
    ReliabilityCache cache(sc.graph, sc.options.caps);
    return report_from_cases(sc, build_all_cases(sc, family, cache));
}

EquilibriumReport pdc_check(const Scenario& sc, const HistoryFamily& family) {
    sc.validate();
    if (sc.monitoring != MonitoringMode::Private)
        fail(Errc::InvalidArgument, "pdc_check requires private monitoring");
    ReliabilityCache cache(sc.graph, sc.options.caps);
    EquilibriumReport rep = report_from_cases(sc, build_all_cases(sc, family, cache));

    for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
        int m = sc.mdel(i);
        rep.bounds["mdel." + std::to_string(i)] =
            m == kInfiniteDelay ? std::numeric_limits<double>::infinity() : m;
    }
    bool coordinated = enforces_coordination(sc.durations, *sc.delays, sc.graph);
    rep.notes.push_back(coordinated ? "durations enforce coordination"
                                    : "durations do not enforce coordination");
    for (auto [i, j] : sc.graph.edges())
        if (!sc.graph.punishment_can_impact(i, j))
            rep.notes.push_back("punishments for a defection on edge (" + std::to_string(i) + "," +
                                std::to_string(j) + ") cannot impact the deviator");
    return rep;
}

double folk_upper_bound(const Scenario& sc) {
    double v = 0.0;
    for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
        double pbar = 0.0;
        for (NodeId j : sc.graph.out_neighbors(i)) pbar += sc.baseline.node[i][j];
        v = std::max(v, pbar);
    }
    return v;
}

double direct_necessary_ratio(const Scenario& sc, NodeId i, NodeId j) {
    sc.validate();
    if (sc.rs.mode != ReactionSetConfig::Mode::Direct)
        fail(Errc::InvalidArgument, "direct_necessary_ratio requires direct reciprocity");
    if (sc.durations.is_grim())
        fail(Errc::InvalidArgument, "direct_necessary_ratio requires a finite duration");
    if (!sc.graph.has_edge(i, j)) fail(Errc::NotAnEdge, "j must be an out-neighbor of i");

    const double tau = sc.durations.base_tau();
    double q_star = exact_non_delivery(sc.graph, sc.baseline, {i}, sc.options.caps);
    ForwardProfile punished = sc.baseline;
    punished.node[j][i] = 0.0;  // only j punishing i
    double q_pun = exact_non_delivery(sc.graph, punished, {i}, sc.options.caps);
    if (q_pun <= q_star)
        fail(Errc::NoBite, "punishment by node " + std::to_string(j) +
                               " does not raise the no-delivery probability of node " +
                               std::to_string(i));
    double pbar = 0.0;
    for (NodeId k : sc.graph.out_neighbors(i)) pbar += sc.baseline.node[i][k];
    double p = sc.baseline.node[i][j];
    return pbar + p / (q_pun - q_star) * (1.0 - q_pun + (1.0 - q_star) / tau);
}

namespace {

// Largest (1 - q_early) / (1 - q_late) over the family: the constant that
// caps how much reliability a deviator keeps while punishments are pending.
struct ReliabilityDropEstimate {
    double c = 1.0;
    bool finite = true;
};

ReliabilityDropEstimate estimate_drop_constant(const Scenario& sc, const HistoryFamily& family,
                                               ReliabilityCache& cache, int early_stages,
                                               int late_from, int late_to) {
    ReliabilityDropEstimate est;
    for (const HistorySeed& seed : family.seeds) {
        for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
            auto stats = continuation_stats(sc, seed, i, late_to + 1, cache);
            for (int r = 0; r < early_stages; ++r) {
                for (int r2 = late_from; r2 <= late_to; ++r2) {
                    double top = 1.0 - stats[r].first;
                    double bottom = 1.0 - stats[r2].first;
                    if (bottom <= 0.0) {
                        if (top > 0.0) est.finite = false;
                        continue;
                    }
                    est.c = std::max(est.c, top / bottom);
                }
            }
        }
    }
    return est;
}

}  // namespace

double indirect_sufficient_ratio(const Scenario& sc, IndirectBoundDetail* detail) {
    sc.validate();
    if (sc.rs.mode != ReactionSetConfig::Mode::FullIndirect)
        fail(Errc::InvalidArgument, "indirect_sufficient_ratio requires full indirect reciprocity");

    IndirectBoundDetail local;
    IndirectBoundDetail& d = detail ? *detail : local;

    if (sc.durations.is_grim()) {
        d.c = 1.0;
        d.notes.push_back("grim trigger: the duration term vanishes and the bound is the folk bound");
        return folk_upper_bound(sc);
    }

    HistoryFamily family = HistoryFamily::standard(sc);
    ReliabilityCache cache(sc.graph, sc.options.caps);
    auto est = estimate_drop_constant(sc, family, cache, 1, 1, 1);
    d.c = est.c;
    d.finite = est.finite;
    if (!est.finite) {
        d.notes.push_back("no finite reliability-drop constant fits the family");
        return std::numeric_limits<double>::infinity();
    }

    const double tau = sc.durations.base_tau();
    double v = 0.0;
    for (const HistorySeed& seed : family.seeds)
        for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
            auto stats = continuation_stats(sc, seed, i, 1, cache);
            v = std::max(v, stats[0].second * (1.0 + d.c / tau));
        }
    return v;
}

double private_sufficient_ratio(const Scenario& sc, double epsilon, PrivateBoundDetail* detail) {
    sc.validate();
    if (sc.monitoring != MonitoringMode::Private)
        fail(Errc::InvalidArgument, "private_sufficient_ratio requires private monitoring");
    if (!enforces_coordination(sc.durations, *sc.delays, sc.graph))
        fail(Errc::NotCoordinated, "durations do not enforce coordination");

    PrivateBoundDetail local;
    PrivateBoundDetail& d = detail ? *detail : local;
    d.epsilon = epsilon;

    HistoryFamily family = HistoryFamily::standard(sc);
    ReliabilityCache cache(sc.graph, sc.options.caps);
    const int n = sc.graph.node_count();
    const double inf = std::numeric_limits<double>::infinity();

    for (NodeId i = 0; i < n; ++i)
        if (!sc.graph.out_neighbors(i).empty() && sc.graph.in_neighbors(i).empty()) {
            d.finite = false;
            d.notes.push_back("bound unattainable: node " + std::to_string(i) +
                              " has no in-neighbors, so no punishment can ever reach it");
            return inf;
        }

    if (sc.durations.is_grim()) {
        // Punishments never end: feasibility is decided by the stationary
        // punished-versus-compliant gap, which the deviator's retained source
        // feed erodes.
        double v = 0.0;
        for (const HistorySeed& seed : family.seeds)
            for (NodeId i = 0; i < n; ++i) {
                if (sc.graph.out_neighbors(i).empty()) continue;
                auto [q, pbar] = stationary_stats(sc, seed, i, cache);
                double alive = 1.0 - q;
                if (alive <= 0.0) continue;
                double denom = alive - sc.baseline.source[i];
                if (denom <= 0.0) {
                    d.finite = false;
                    d.notes.push_back(
                        "bound unattainable: a deviator kept its whole reliability through the source");
                    return inf;
                }
                v = std::max(v, alive * pbar / denom);
            }
        d.c = 1.0;
        d.printed_bound = folk_upper_bound(sc);
        d.simplified_valid = true;
        d.simplified_bound = v;
        d.notes.push_back("grim trigger: duration terms vanish; only the source feed separates the bound from the folk bound");
        return v;
    }

    const int tau = sc.durations.base_tau();

    // Reliability-drop constant of the window assumption.
    double c = 1.0;
    bool finite = true;
    double max_pbar0 = 0.0;
    for (const HistorySeed& seed : family.seeds) {
        for (NodeId i = 0; i < n; ++i) {
            const int mdel = sc.mdel(i);
            auto stats = continuation_stats(sc, seed, i, mdel + tau + 1, cache);
            for (int r2 = mdel + 1; r2 <= mdel + tau; ++r2) {
                double late = 1.0 - stats[r2].first;
                for (int r = 0; r <= mdel; ++r) {
                    double early = 1.0 - stats[r].first;
                    if (late <= 0.0) {
                        if (early > 0.0) finite = false;
                        continue;
                    }
                    c = std::max(c, early / late);
                }
            }
            max_pbar0 = std::max(max_pbar0, stats[0].second);
        }
    }
    d.c = c;
    d.finite = finite;
    if (!finite) {
        d.notes.push_back("no finite reliability-drop constant fits the family");
        return inf;
    }

    double v = 0.0;
    double printed = 0.0;
    for (const HistorySeed& seed : family.seeds) {
        for (NodeId i = 0; i < n; ++i) {
            if (sc.graph.out_neighbors(i).empty()) continue;
            const int mdel = sc.mdel(i);
            const double leak = sc.baseline.source[i];
            auto stats = continuation_stats(sc, seed, i, mdel + tau + 1, cache);

            // Window-aggregated deterrence: while every in-neighbor punishes,
            // the deviator keeps exactly its source feed, so each window stage
            // deters by alive_r (beta - gamma pbar_r) - leak * beta; the early
            // stages cost at most their compliant forwarding plus epsilon.
            double early_cost = 0.0;
            double deter = 0.0, window_cost = 0.0;
            for (int r = 0; r <= mdel; ++r)
                early_cost += (1.0 - stats[r].first) * stats[r].second;
            for (int r2 = mdel + 1; r2 <= mdel + tau; ++r2) {
                double alive = 1.0 - stats[r2].first;
                deter += alive - leak;
                window_cost += alive * stats[r2].second;
            }
            double denom = deter - epsilon * (mdel + 1);
            if (denom <= 0.0) {
                d.finite = false;
                d.notes.push_back(
                    "bound unattainable: the punishment window cannot outweigh the retained "
                    "source feed and epsilon allowance");
                return inf;
            }
            v = std::max(v, (window_cost + early_cost) / denom);

            // literal A/B/C right-hand side, reported for reference
            for (int r2 = mdel + 1; r2 <= mdel + tau; ++r2) {
                double alive = 1.0 - stats[r2].first;
                if (alive <= 0.0) continue;
                double a_term = 1.0 - epsilon * (mdel + 1) / (alive * tau);
                for (int r = 0; r <= mdel; ++r) {
                    if (stats[r].first >= 1.0) continue;
                    double b_minus_c =
                        static_cast<double>(tau) / c - epsilon * (mdel + 1) / (1.0 - stats[r].first);
                    if (a_term > 0.0 && b_minus_c > 0.0)
                        printed = std::max(printed,
                                           stats[r2].second / a_term + stats[r].second / b_minus_c);
                }
            }
        }
    }
    d.printed_bound = printed;

    int mdel_max = 0;
    for (NodeId i = 0; i < n; ++i) mdel_max = std::max(mdel_max, sc.mdel(i));
    d.simplified_valid = tau >= mdel_max + 1;
    if (d.simplified_valid) {
        double worst = 0.0;
        for (NodeId i = 0; i < n; ++i)
            worst = std::max(worst, max_pbar0 * (1.0 + c / (sc.mdel(i) + 1)));
        d.simplified_bound = worst;
    }
    return v;
}

namespace {

std::vector<double> omega_grid(double step) {
    std::vector<double> grid;
    grid.push_back(1e-4);
    for (double w = step; w < 1.0 - step / 2; w += step) grid.push_back(w);
    for (double w : {1.0 - 1e-4, 1.0 - 1e-5, 1.0 - 1e-6, 1.0 - 1e-7}) grid.push_back(w);
    std::sort(grid.begin(), grid.end());
    return grid;
}

}  // namespace

std::optional<double> min_omega(const Scenario& sc, NodeId i, const DropDeviation& deviation,
                                const HistorySeed& history) {
    sc.validate();
    ReliabilityCache cache(sc.graph, sc.options.caps);
    MarginCase mc = build_margin_case(sc, history, DropDeviation{i, deviation.dropped, 0}, cache);
    const double beta = sc.params.beta[i], gamma = sc.params.gamma[i];

    // At omega -> 0 only the deviation stage survives.
    double stage0 = beta * mc.benefit_coeff[0] + gamma * mc.cost_coeff[0];
    if (stage0 >= 0.0) return 0.0;  // degenerate: no impatience constraint at all

    auto value = [&](double w) { return mc.margin(beta, gamma, w); };
    std::vector<double> grid = omega_grid(sc.options.omega_grid_step);
    double prev = 0.0;
    for (double w : grid) {
        if (value(w) >= 0.0) {
            double lo = prev, hi = w;
            while (hi - lo > 1e-9) {
                double mid = 0.5 * (lo + hi);
                (value(mid) >= 0.0 ? hi : lo) = mid;
            }
            return hi;
        }
        prev = w;
    }
    return std::nullopt;
}

std::vector<std::optional<double>> solve_min_omega_per_node(const Scenario& sc,
                                                            const HistoryFamily& family) {
    const int n = sc.graph.node_count();
    std::vector<std::optional<double>> out(n, 0.0);
    for (const HistorySeed& seed : family.seeds) {
        for (NodeId i = 0; i < n; ++i) {
            if (!out[i]) continue;  // already unattainable
            std::vector<NodeId> droppable = droppable_neighbors(sc, seed, i);
            for (auto& d : enumerate_drop_sets(droppable)) {
                auto w = min_omega(sc, i, DropDeviation{i, d, 0}, seed);
                if (!w) {
                    out[i] = std::nullopt;
                    break;
                }
                out[i] = std::max(*out[i], *w);
            }
        }
    }
    return out;
}

double grim_min_omega(const Scenario& sc, NodeId i) {
    sc.validate();
    double pbar = 0.0;
    for (NodeId j : sc.graph.out_neighbors(i)) pbar += sc.baseline.node[i][j];
    double ratio = sc.params.gamma[i] * pbar / sc.params.beta[i];
    if (ratio >= 1.0)
        fail(Errc::RatioTooSmall, "grim trigger needs beta > gamma * pbar for node " + std::to_string(i));
    int mdel = sc.mdel(i);
    if (mdel == kInfiniteDelay)
        fail(Errc::UnpunishableNode, "node " + std::to_string(i) + " has an in-neighbor that is never informed");
    if (mdel == 0) return ratio;
    return std::pow(ratio, 1.0 / static_cast<double>(mdel));
}

namespace {

// Margin of every case is affine in the uniform ratio (gamma = 1), so the
// per-(case, omega) polynomial evaluations are hoisted out of the bisection.
struct FeasibilityTable {
    std::vector<double> grid;
    // per node: flattened [case][omega] coefficient pairs
    std::vector<std::vector<double>> benefit, cost;

    bool feasible(double ratio, double tol) const {
        for (std::size_t i = 0; i < benefit.size(); ++i) {
            const auto& B = benefit[i];
            const auto& C = cost[i];
            if (B.empty()) continue;
            const std::size_t cases = B.size() / grid.size();
            bool node_ok = false;
            for (std::size_t w = 0; w < grid.size() && !node_ok; ++w) {
                bool all = true;
                for (std::size_t c = 0; c < cases; ++c) {
                    if (ratio * B[c * grid.size() + w] + C[c * grid.size() + w] < -tol) {
                        all = false;
                        break;
                    }
                }
                node_ok = all;
            }
            if (!node_ok) return false;
        }
        return true;
    }
};

FeasibilityTable build_feasibility_table(const Scenario& sc, const HistoryFamily& family) {
    ReliabilityCache cache(sc.graph, sc.options.caps);
    std::vector<MarginCase> cases = build_all_cases(sc, family, cache);

    FeasibilityTable table;
    table.grid = omega_grid(sc.options.omega_grid_step);
    table.benefit.resize(sc.graph.node_count());
    table.cost.resize(sc.graph.node_count());
    for (const MarginCase& mc : cases) {
        auto& B = table.benefit[mc.deviator];
        auto& C = table.cost[mc.deviator];
        for (double w : table.grid) {
            B.push_back(mc.margin(1.0, 0.0, w));
            C.push_back(mc.margin(0.0, 1.0, w));
        }
    }
    return table;
}

}  // namespace

double effectiveness_threshold(const Scenario& sc, const HistoryFamily& family) {
    sc.validate();
    FeasibilityTable table = build_feasibility_table(sc, family);
    const double tol = sc.options.margin_tolerance;

    double lo = folk_upper_bound(sc);
    int guard = 0;
    while (table.feasible(lo, tol) && lo > 1e-12 && guard++ < 80) lo *= 0.5;
    if (table.feasible(lo, tol)) return lo;

    double hi = std::max({lo * 1.5, lo + 1.0, 1.0});
    guard = 0;
    while (!table.feasible(hi, tol)) {
        hi *= 2.0;
        if (hi > sc.options.ratio_cap || guard++ > 80)
            return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > sc.options.bisect_rel_tolerance * hi) {
        double mid = 0.5 * (lo + hi);
        (table.feasible(mid, tol) ? hi : lo) = mid;
    }
    return hi;
}

EffectivenessResult effectiveness_analysis(const Scenario& sc) {
    EffectivenessResult res;
    HistoryFamily family = HistoryFamily::standard(sc);
    res.folk = folk_upper_bound(sc);
    res.bounds["folk"] = res.folk;
    res.threshold = effectiveness_threshold(sc, family);
    res.attainable = std::isfinite(res.threshold);
    res.bounds["empirical_threshold"] = res.threshold;

    if (sc.rs.mode == ReactionSetConfig::Mode::Direct && !sc.durations.is_grim() &&
        sc.monitoring == MonitoringMode::Public) {
        double worst = 0.0;
        bool any = false;
        for (auto [i, j] : sc.graph.edges()) {
            try {
                worst = std::max(worst, direct_necessary_ratio(sc, i, j));
                any = true;
            } catch (const Error&) {
                // no bite on this edge; the bound does not apply there
            }
        }
        if (any) {
            res.necessary = worst;
            res.bounds["direct_necessary"] = worst;
        }
    }

    if (sc.rs.mode == ReactionSetConfig::Mode::FullIndirect) {
        if (sc.monitoring == MonitoringMode::Public) {
            IndirectBoundDetail detail;
            double v = indirect_sufficient_ratio(sc, &detail);
            res.sufficient = v;
            res.bounds["indirect_sufficient"] = v;
            res.bounds["drop_constant_c"] = detail.c;
            res.notes.insert(res.notes.end(), detail.notes.begin(), detail.notes.end());
        } else if (enforces_coordination(sc.durations, *sc.delays, sc.graph)) {
            PrivateBoundDetail detail;
            double v = private_sufficient_ratio(sc, 0.0, &detail);
            res.sufficient = v;
            res.bounds["private_sufficient"] = v;
            res.bounds["private_sufficient_printed"] = detail.printed_bound;
            res.bounds["drop_constant_c"] = detail.c;
            if (detail.simplified_valid)
                res.bounds["private_sufficient_simplified"] = detail.simplified_bound;
            res.notes.insert(res.notes.end(), detail.notes.begin(), detail.notes.end());
        } else {
            res.notes.push_back("no sufficient bound applies: durations do not enforce coordination");
        }
    }

    const double slack = std::max(1e-9, 2.0 * sc.options.bisect_rel_tolerance * res.threshold);
    res.sandwich_ok = true;
    if (res.attainable) {
        if (res.threshold < res.folk - slack) res.sandwich_ok = false;
        if (res.sufficient && std::isfinite(*res.sufficient) &&
            res.threshold > *res.sufficient + slack)
            res.sandwich_ok = false;
    }
    res.notes.push_back(res.sandwich_ok ? "sandwich check passed" : "sandwich check FAILED");
    return res;
}

}  // namespace epigame
