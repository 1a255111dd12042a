#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "epigame/analyzer.hpp"
#include "epigame/generators.hpp"

using namespace epigame;

namespace {

Scenario pair_direct(double beta = 10.0) {
    Scenario sc;
    sc.graph = OverlayGraph::build(2, {{0, 1}, {1, 0}}, {0, 1});
    sc.baseline = ForwardProfile::uniform(sc.graph, 0.5, 0.5);
    sc.params = UtilityParams::uniform(2, beta, 1.0, 0.9);
    sc.monitoring = MonitoringMode::Public;
    sc.rs.mode = ReactionSetConfig::Mode::Direct;
    sc.durations = DurationPolicy::uniform(3);
    return sc;
}

Scenario complete_graph_scenario(int n, double source_p, double node_p, double beta,
                                 ReactionSetConfig::Mode mode, DurationPolicy dur) {
    Scenario sc;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> targets;
    for (NodeId u = 0; u < n; ++u) {
        targets.push_back(u);
        for (NodeId v = 0; v < n; ++v)
            if (u != v) edges.emplace_back(u, v);
    }
    sc.graph = OverlayGraph::build(n, edges, targets);
    sc.baseline = ForwardProfile::uniform(sc.graph, source_p, node_p);
    sc.params = UtilityParams::uniform(n, beta, 1.0, 0.9);
    sc.monitoring = MonitoringMode::Public;
    sc.rs.mode = mode;
    sc.durations = dur;
    sc.options.offsets = {1};
    return sc;
}

}  // namespace

TEST_CASE("folk bound is the worst-case baseline forwarding cost") {
    Scenario k4 = complete_graph_scenario(4, 0.5, 0.5, 3.0, ReactionSetConfig::Mode::FullIndirect,
                                          DurationPolicy::uniform(2));
    CHECK(folk_upper_bound(k4) == doctest::Approx(1.5));

    Scenario chain;
    chain.graph = OverlayGraph::build(2, {{0, 1}}, {0});
    chain.baseline = ForwardProfile::zeros(chain.graph);
    chain.baseline.source[0] = 0.5;
    chain.baseline.node[0][1] = 0.8;
    chain.params = UtilityParams::uniform(2, 2.0, 1.0, 0.9);
    CHECK(folk_upper_bound(chain) == doctest::Approx(0.8));

    chain.baseline.node[0][1] = 0.0;
    CHECK(folk_upper_bound(chain) == 0.0);
}

TEST_CASE("dc_check passes the worked pair scenario and fails the cheap one") {
    Scenario sc = pair_direct(10.0);
    HistoryFamily fam = HistoryFamily::standard(sc);
    EquilibriumReport rep = dc_check(sc, fam);
    CHECK(rep.passed());
    CHECK(rep.worst.margin == doctest::Approx(1.97406250).epsilon(1e-9));

    Scenario cheap = pair_direct(1.0);
    EquilibriumReport bad = dc_check(cheap, HistoryFamily::standard(cheap));
    CHECK(bad.verdict == EquilibriumReport::Verdict::Fail);
    CHECK(bad.worst.deviator == 0);
    CHECK(bad.worst.dropped == std::vector<NodeId>{1});
}

TEST_CASE("grim full indirect below the folk bound fails") {
    Scenario sc = complete_graph_scenario(4, 0.5, 0.5, 1.4, ReactionSetConfig::Mode::FullIndirect,
                                          DurationPolicy::grim_trigger());
    EquilibriumReport rep = dc_check(sc, HistoryFamily::standard(sc));
    CHECK(rep.verdict == EquilibriumReport::Verdict::Fail);
}

TEST_CASE("direct necessary ratio matches the closed form on the pair") {
    Scenario sc = pair_direct(10.0);
    // q* = 0.375, q' = 0.5, p = 0.5, pbar = 0.5, tau = 3:
    // 0.5 + (0.5/0.125) * (1 - 0.5 + 0.625/3)
    double expected = 0.5 + 4.0 * (0.5 + 0.625 / 3.0);
    CHECK(direct_necessary_ratio(sc, 0, 1) == doctest::Approx(expected).epsilon(1e-12));

    // The duration term vanishes as tau grows.
    sc.durations = DurationPolicy::uniform(100000);
    CHECK(direct_necessary_ratio(sc, 0, 1) == doctest::Approx(0.5 + 4.0 * 0.5).epsilon(1e-3));
}

TEST_CASE("direct necessary ratio reports missing bite") {
    Scenario sc;
    sc.graph = OverlayGraph::build(2, {{0, 1}}, {0});
    sc.baseline = ForwardProfile::zeros(sc.graph);
    sc.baseline.source[0] = 0.5;
    sc.baseline.node[0][1] = 0.5;
    sc.params = UtilityParams::uniform(2, 5.0, 1.0, 0.9);
    sc.rs.mode = ReactionSetConfig::Mode::Direct;
    sc.durations = DurationPolicy::uniform(2);
    // victim 1 has no edge back toward 0: cutting nothing changes nothing
    CHECK_THROWS_AS(direct_necessary_ratio(sc, 0, 1), Error);
}

TEST_CASE("indirect sufficient ratio: K5 half probabilities give pbar (1 + c/tau)") {
    Scenario sc = complete_graph_scenario(5, 0.5, 0.5, 5.0, ReactionSetConfig::Mode::FullIndirect,
                                          DurationPolicy::uniform(4));
    IndirectBoundDetail detail;
    double v = indirect_sufficient_ratio(sc, &detail);
    // Under public monitoring reliability only improves as punishments end,
    // so the estimated constant stays at its floor of 1 and the bound is
    // max pbar * (1 + 1/4) = 2 * 1.25.
    CHECK(detail.c == doctest::Approx(1.0));
    CHECK(v == doctest::Approx(2.5).epsilon(1e-9));

    sc.durations = DurationPolicy::grim_trigger();
    CHECK(indirect_sufficient_ratio(sc) == doctest::Approx(folk_upper_bound(sc)).epsilon(1e-12));
}

TEST_CASE("min omega satisfies the margin and is tight") {
    Scenario sc = pair_direct(10.0);
    auto w = min_omega(sc, 0, DropDeviation{0, {1}, 0}, HistorySeed{});
    REQUIRE(w.has_value());
    REQUIRE(*w > 0.0);

    // independent bisection on the closed-form margin:
    // -0.3125 + 0.9375 (w + w^2 + w^3) >= 0
    auto closed = [](double x) { return -0.3125 + 0.9375 * (x + x * x + x * x * x); };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (closed(mid) >= 0 ? hi : lo) = mid;
    }
    CHECK(*w == doctest::Approx(hi).epsilon(1e-6));

    Scenario probe = sc;
    probe.params.omega.assign(2, *w);
    CHECK(discounted_difference(probe, HistorySeed{}, DropDeviation{0, {1}, 0}) >= -1e-9);
    probe.params.omega.assign(2, std::max(*w - 1e-6, 1e-9));
    CHECK(discounted_difference(probe, HistorySeed{}, DropDeviation{0, {1}, 0}) < 0.0);
}

TEST_CASE("min omega reports hopeless deviations as unattainable") {
    Scenario sc = pair_direct(0.4);  // beta below the folk bound: no omega helps
    auto w = min_omega(sc, 0, DropDeviation{0, {1}, 0}, HistorySeed{});
    CHECK_FALSE(w.has_value());
}

TEST_CASE("min omega degenerates to zero when the deviation stage is free") {
    // Chain s -> 0 -> 1 -> 2 under full indirect reciprocity: after node 0
    // defects, its self-punishment starves node 1 completely (q = 1), so node
    // 1 dropping node 2 at that history costs nothing in expectation and no
    // patience is needed to deter... the margin starts at exactly zero.
    Scenario sc;
    sc.graph = OverlayGraph::build(3, {{0, 1}, {1, 2}}, {0});
    sc.baseline = ForwardProfile::zeros(sc.graph);
    sc.baseline.source[0] = 0.5;
    sc.baseline.node[0][1] = 0.5;
    sc.baseline.node[1][2] = 0.5;
    sc.params = UtilityParams::uniform(3, 5.0, 1.0, 0.9);
    sc.monitoring = MonitoringMode::Public;
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.durations = DurationPolicy::uniform(3);

    HistorySeed seed;
    seed.deviations.push_back({0, {1}, 0});
    seed.length = 1;
    seed.label = "upstream-defected";

    ReliabilityCache cache(sc.graph);
    MarginCase probe = build_margin_case(sc, seed, DropDeviation{1, {2}, 0}, cache);
    REQUIRE(5.0 * probe.benefit_coeff[0] + probe.cost_coeff[0] == 0.0);

    auto w = min_omega(sc, 1, DropDeviation{1, {2}, 0}, seed);
    REQUIRE(w.has_value());
    CHECK(*w == 0.0);
}

TEST_CASE("grim min omega vanishes as the benefit grows") {
    Scenario sc = pair_direct(2.0);
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.durations = DurationPolicy::grim_trigger();
    double prev = grim_min_omega(sc, 0);
    for (double beta : {10.0, 100.0, 1e6}) {
        sc.params.beta.assign(2, beta);
        double w = grim_min_omega(sc, 0);
        CHECK(w < prev);
        prev = w;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("grim min omega closed form and residual") {
    // The closed form is a full-indirect-reciprocity result: the punished
    // deviator must be cut off entirely for the stationary algebra to apply.
    Scenario sc = pair_direct(2.0);
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.durations = DurationPolicy::grim_trigger();
    // public: mdel = 0, so the bound is gamma*pbar/beta = 0.25
    double w = grim_min_omega(sc, 0);
    CHECK(w == doctest::Approx(0.25).epsilon(1e-12));

    Scenario probe = sc;
    probe.params.omega.assign(2, w);
    double residual = discounted_difference(probe, HistorySeed{}, DropDeviation{0, {1}, 0});
    CHECK(residual >= -1e-9);
    CHECK(residual == doctest::Approx(0.0).epsilon(1e-9));

    Scenario starving = sc;
    starving.params.beta.assign(2, 0.4);
    CHECK_THROWS_AS(grim_min_omega(starving, 0), Error);
}

TEST_CASE("grim min omega grows with the accusation delay") {
    // beta = 2, gamma = 1, pbar = 1 with two out-edges at 0.5 each.
    Scenario sc;
    sc.graph =
        OverlayGraph::build(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}, {0, 1, 2});
    sc.baseline = ForwardProfile::uniform(sc.graph, 0.5, 0.5);
    sc.params = UtilityParams::uniform(3, 2.0, 1.0, 0.9);
    sc.monitoring = MonitoringMode::Private;
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.delays = compute_delays(sc.graph);
    DelayModelConfig cfg;
    cfg.overrides.push_back({2, 0, 1, 1});
    cfg.overrides.push_back({1, 0, 2, 1});
    sc.delays = compute_delays(sc.graph, cfg);
    sc.durations = DurationPolicy::grim_trigger();

    REQUIRE(sc.mdel(0) == 1);
    CHECK(grim_min_omega(sc, 0) == doctest::Approx(0.5).epsilon(1e-12));

    cfg.overrides.clear();
    cfg.overrides.push_back({2, 0, 1, 2});
    sc.delays = compute_delays(sc.graph, cfg);
    REQUIRE(sc.mdel(0) == 2);
    CHECK(grim_min_omega(sc, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("effectiveness threshold of grim full indirect sits at the folk bound") {
    Scenario sc = complete_graph_scenario(4, 0.5, 0.5, 3.0, ReactionSetConfig::Mode::FullIndirect,
                                          DurationPolicy::grim_trigger());
    HistoryFamily fam = HistoryFamily::standard(sc);
    double threshold = effectiveness_threshold(sc, fam);
    double folk = folk_upper_bound(sc);
    CHECK(std::abs(threshold - folk) / folk <= 1e-3);
}

TEST_CASE("sandwich holds on small full-indirect scenarios") {
    SplitMix64 rng(2718);
    int done = 0;
    for (int c = 0; c < 40 && done < 6; ++c) {
        ScenarioGenOptions opts;
        opts.graph.min_nodes = 2;
        opts.graph.max_nodes = 4;
        opts.graph.reverse_edge_prob = 0.8;
        opts.force_full_indirect = true;
        Scenario sc = random_public_scenario(rng, opts);
        sc.options.offsets = {1};
        sc.options.history_depth = 1;
        HistoryFamily fam = HistoryFamily::standard(sc);
        double threshold = effectiveness_threshold(sc, fam);
        if (!std::isfinite(threshold)) continue;
        ++done;
        double folk = folk_upper_bound(sc);
        double sufficient = indirect_sufficient_ratio(sc);
        double slack = std::max(1e-9, 2e-6 * threshold);
        CHECK(threshold >= folk - slack);
        if (std::isfinite(sufficient)) CHECK(threshold <= sufficient + slack);
    }
    CHECK(done > 0);
}

TEST_CASE("pdc fails on the directed cycle for any benefit") {
    Scenario sc;
    sc.graph = OverlayGraph::build(3, {{0, 1}, {1, 2}, {2, 0}}, {0});
    sc.baseline = ForwardProfile::zeros(sc.graph);
    sc.baseline.source[0] = 0.6;
    for (auto [u, v] : sc.graph.edges()) sc.baseline.node[u][v] = 0.8;
    sc.params = UtilityParams::uniform(3, 1000.0, 1.0, 0.95);
    sc.monitoring = MonitoringMode::Private;
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.delays = compute_delays(sc.graph);
    sc.durations = DurationPolicy::uniform(3);

    CHECK_FALSE(sc.graph.punishment_can_impact(0, 1));
    for (double beta : {2.0, 100.0, 10000.0}) {
        sc.params.beta.assign(3, beta);
        EquilibriumReport rep = pdc_check(sc, HistoryFamily::standard(sc));
        CHECK(rep.verdict == EquilibriumReport::Verdict::Fail);
    }
    EquilibriumReport rep = pdc_check(sc, HistoryFamily::standard(sc));
    bool noted = false;
    for (const std::string& n : rep.notes)
        noted = noted || n.find("cannot impact") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("pdc passes a coordinated full-indirect scenario with a generous benefit") {
    Scenario sc;
    sc.graph =
        OverlayGraph::build(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}, {0, 1, 2});
    sc.baseline = ForwardProfile::uniform(sc.graph, 0.5, 0.5);
    sc.params = UtilityParams::uniform(3, 20.0, 1.0, 0.95);
    sc.monitoring = MonitoringMode::Private;
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.delays = compute_delays(sc.graph);
    sc.durations = coordinated_durations(sc.graph, *sc.delays, 3);

    EquilibriumReport rep = pdc_check(sc, HistoryFamily::standard(sc));
    CHECK(rep.passed());

    PrivateBoundDetail detail;
    double bound = private_sufficient_ratio(sc, 0.0, &detail);
    CHECK(std::isfinite(bound));
    CHECK(bound >= folk_upper_bound(sc));
}

TEST_CASE("private sufficient ratio requires coordination") {
    Scenario sc;
    sc.graph = OverlayGraph::build(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 0}}, {0});
    sc.baseline = ForwardProfile::uniform(sc.graph, 0.5, 0.5);
    sc.params = UtilityParams::uniform(4, 10.0, 1.0, 0.9);
    sc.monitoring = MonitoringMode::Private;
    sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
    sc.delays = compute_delays(sc.graph);
    sc.durations = DurationPolicy::uniform(1);
    CHECK_THROWS_AS(private_sufficient_ratio(sc, 0.0), Error);
}

TEST_CASE("pass verdicts survive enlarging the history family") {
    SplitMix64 rng(1111);
    int passes = 0;
    for (int c = 0; c < 20 && passes < 5; ++c) {
        ScenarioGenOptions opts;
        opts.graph.max_nodes = 4;
        opts.graph.reverse_edge_prob = 0.8;
        opts.force_full_indirect = true;
        opts.min_beta = 8.0;
        opts.max_beta = 30.0;
        Scenario sc = random_public_scenario(rng, opts);
        sc.params.omega.assign(sc.graph.node_count(), 0.97);
        sc.options.offsets = {1};
        sc.options.history_depth = 1;
        EquilibriumReport small = dc_check(sc, HistoryFamily::standard(sc));
        if (!small.passed()) continue;
        ++passes;

        Scenario wide = sc;
        wide.options.offsets = {1, 2, 3};
        wide.options.history_depth = 2;
        EquilibriumReport big = dc_check(wide, HistoryFamily::standard(wide));
        CHECK(big.passed());
    }
    CHECK(passes > 0);
}

TEST_CASE("margins grow with beta across the family") {
    Scenario sc = pair_direct(5.0);
    HistoryFamily fam = HistoryFamily::standard(sc);
    EquilibriumReport a = dc_check(sc, fam);
    sc.params.beta.assign(2, 7.0);
    EquilibriumReport b = dc_check(sc, fam);
    REQUIRE(a.margins.size() == b.margins.size());
    for (std::size_t k = 0; k < a.margins.size(); ++k) CHECK(b.margins[k].margin >= a.margins[k].margin);
}
