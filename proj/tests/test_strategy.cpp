#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "epigame/generators.hpp"
#include "epigame/strategy.hpp"

using namespace epigame;

namespace {

OverlayGraph pair_graph() { return OverlayGraph::build(2, {{0, 1}, {1, 0}}, {0, 1}); }

// Triangle with every edge in both directions, fed by the source everywhere.
OverlayGraph k3() {
    return OverlayGraph::build(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}, {0, 1, 2});
}

SignalVerdict defect_on(const OverlayGraph& g, NodeId i, NodeId j) {
    SignalVerdict s(g.edge_count());
    s.defect[g.edge_index(i, j)] = 1;
    return s;
}

}  // namespace

TEST_CASE("reaction sets contain the endpoints and, for full indirect, the in-neighbors") {
    OverlayGraph g = k3();
    ReactionSetConfig direct{ReactionSetConfig::Mode::Direct, {}};
    CHECK(direct.contains(g, 0, 1, 0));
    CHECK(direct.contains(g, 0, 1, 1));
    CHECK_FALSE(direct.contains(g, 0, 1, 2));
    CHECK_FALSE(direct.contains_source(g, 0, 1));

    ReactionSetConfig full{ReactionSetConfig::Mode::FullIndirect, {}};
    CHECK(full.contains(g, 0, 1, 2));  // 2 is an in-neighbor of 0
    CHECK(full.contains_source(g, 0, 1));

    ReactionSetConfig custom{ReactionSetConfig::Mode::Custom, {{{0, 1}, {0, 1, 2}}}};
    CHECK(custom.contains(g, 0, 1, 2));
    CHECK_FALSE(custom.contains(g, 1, 0, 2));  // unlisted pair falls back to endpoints
}

TEST_CASE("quiet signals leave an empty state empty") {
    OverlayGraph g = k3();
    ReactionSetConfig rs{ReactionSetConfig::Mode::FullIndirect, {}};
    DurationPolicy tau = DurationPolicy::uniform(3);
    PunishState state(g.node_count());
    state = update_ds_public(state, SignalVerdict(g.edge_count()), rs, tau, g);
    CHECK(state.empty());
}

TEST_CASE("a defection ages through the reaction-set pairs and expires at tau") {
    OverlayGraph g = k3();
    ReactionSetConfig rs{ReactionSetConfig::Mode::FullIndirect, {}};
    DurationPolicy tau = DurationPolicy::uniform(3);

    PunishState state(g.node_count());
    state = update_ds_public(state, defect_on(g, 0, 1), rs, tau, g);
    SignalVerdict quiet(g.edge_count());

    for (int age = 0; age < 3; ++age) {
        // every holder pair inside RS[0,1] = {0,1,2,source} carries the record
        for (auto [u, v] : g.edges())
            CHECK(state.records(u, v) == std::vector<DefectionRecord>{{0, 1, age}});
        for (NodeId t : g.source_targets())
            CHECK(state.records(kSourceId, t) == std::vector<DefectionRecord>{{0, 1, age}});
        state = update_ds_public(state, quiet, rs, tau, g);
    }
    CHECK(state.empty());
}

TEST_CASE("direct reciprocity keeps the record between the endpoints only") {
    OverlayGraph g = k3();
    ReactionSetConfig rs{ReactionSetConfig::Mode::Direct, {}};
    DurationPolicy tau = DurationPolicy::uniform(2);
    PunishState state(g.node_count());
    state = update_ds_public(state, defect_on(g, 0, 1), rs, tau, g);
    CHECK(state.records(0, 1) == std::vector<DefectionRecord>{{0, 1, 0}});
    CHECK(state.records(1, 0) == std::vector<DefectionRecord>{{0, 1, 0}});
    CHECK(state.records(0, 2).empty());
    CHECK(state.records(2, 1).empty());
    CHECK(state.records(kSourceId, 0).empty());
}

TEST_CASE("grim trigger records never expire") {
    OverlayGraph g = pair_graph();
    ReactionSetConfig rs{ReactionSetConfig::Mode::Direct, {}};
    DurationPolicy grim = DurationPolicy::grim_trigger();
    PunishState state(g.node_count());
    state = update_ds_public(state, defect_on(g, 0, 1), rs, grim, g);
    SignalVerdict quiet(g.edge_count());
    for (int k = 0; k < 100; ++k) state = update_ds_public(state, quiet, rs, grim, g);
    CHECK(state.records(0, 1) == std::vector<DefectionRecord>{{0, 1, 100}});
}

TEST_CASE("thresholds: empty state plays the baseline") {
    OverlayGraph g = k3();
    ForwardProfile base = ForwardProfile::uniform(g, 0.4, 0.6);
    PunishState state(g.node_count());
    CHECK(threshold_profile(state, base, g) == base);
}

TEST_CASE("thresholds: punishers and the deviator zero out while the record lives") {
    OverlayGraph g = k3();
    ForwardProfile base = ForwardProfile::uniform(g, 0.4, 0.6);
    ReactionSetConfig rs{ReactionSetConfig::Mode::FullIndirect, {}};
    DurationPolicy tau = DurationPolicy::uniform(3);
    PunishState state(g.node_count());
    state = update_ds_public(state, defect_on(g, 0, 1), rs, tau, g);
    ForwardProfile thr = threshold_profile(state, base, g);

    CHECK(thr.node[1][0] == 0.0);  // victim punishes the deviator
    CHECK(thr.node[2][0] == 0.0);  // in-neighbor punishes the deviator
    CHECK(thr.source[0] == 0.0);   // the source abides too
    CHECK(thr.node[0][1] == 0.0);  // deviator self-punishes toward the reaction set
    CHECK(thr.node[0][2] == 0.0);
    CHECK(thr.node[1][2] == base.node[1][2]);  // unrelated edges stay at baseline
    CHECK(thr.node[2][1] == base.node[2][1]);
    CHECK(thr.source[1] == base.source[1]);
}

TEST_CASE("negative-age records do not drive thresholds yet") {
    OverlayGraph g = pair_graph();
    ForwardProfile base = ForwardProfile::uniform(g, 0.4, 0.6);
    PunishState state(g.node_count());
    state.records(0, 1).push_back({1, 0, -2});
    ForwardProfile thr = threshold_profile(state, base, g);
    CHECK(thr == base);
    state.records(0, 1)[0].age = 0;
    thr = threshold_profile(state, base, g);
    CHECK(thr.node[0][1] == 0.0);
}

TEST_CASE("private insertion waits for the slower pair member") {
    // Holder 0 observes at delay 1, its peer 2 at delay 3: the record enters
    // at age -2 and first becomes active after the stage-3 update, exactly
    // when the peer is informed.
    OverlayGraph g = OverlayGraph::build(4, {{0, 2}, {2, 0}, {1, 2}, {2, 1}, {3, 1}, {1, 3}, {3, 0}, {0, 3}}, {0, 1, 2, 3});
    DelayModelConfig cfg;
    cfg.overrides.push_back({0, 3, 1, 1});
    cfg.overrides.push_back({2, 3, 1, 3});
    DelayMatrix d = compute_delays(g, cfg);
    DurationPolicy tau = DurationPolicy::uniform(5);

    std::vector<DefectionEvent> log{{3, 1, 0}};
    PunishState state(g.node_count());
    std::vector<int> expected_age_by_stage{-2, -1, 0, 1};
    for (int stage = 0; stage < 6; ++stage) {
        std::vector<SignalVerdict> signals;
        for (NodeId k = 0; k < g.node_count(); ++k)
            signals.push_back(private_signal(g, k, log, stage, d));
        state = update_ds_private(state, signals, d, tau, g);
        const auto& recs = state.records(0, 2);
        if (stage < 1) {
            CHECK(recs.empty());
        } else {
            int idx = stage - 1;
            if (idx < static_cast<int>(expected_age_by_stage.size())) {
                REQUIRE(recs.size() == 1);
                CHECK(recs[0] == DefectionRecord{3, 1, expected_age_by_stage[idx]});
            }
        }
    }
}

TEST_CASE("a peer that can never be informed suppresses the record") {
    // s -> 0 -> 1, 2 -> 0: accusation (0,1) can never reach 2, so holder 0
    // never tracks the defection on behalf of the pair (0, 2).
    OverlayGraph g = OverlayGraph::build(3, {{0, 1}, {2, 0}}, {0, 2});
    DelayMatrix d = compute_delays(g);
    REQUIRE(delay_of(g, d, 2, 0, 1) == kInfiniteDelay);
    DurationPolicy tau = DurationPolicy::uniform(4);

    std::vector<DefectionEvent> log{{0, 1, 0}};
    PunishState state(g.node_count());
    for (int stage = 0; stage < 6; ++stage) {
        std::vector<SignalVerdict> signals;
        for (NodeId k = 0; k < g.node_count(); ++k)
            signals.push_back(private_signal(g, k, log, stage, d));
        state = update_ds_private(state, signals, d, tau, g);
        CHECK(state.records(0, 2).empty());
        CHECK(state.records(2, 0).empty());
    }
}

TEST_CASE("zero delays activate immediately") {
    OverlayGraph g = pair_graph();
    DelayMatrix d = compute_delays(g);
    DurationPolicy tau = DurationPolicy::uniform(2);
    std::vector<DefectionEvent> log{{0, 1, 0}};
    PunishState state(g.node_count());
    std::vector<SignalVerdict> signals;
    for (NodeId k = 0; k < g.node_count(); ++k) signals.push_back(private_signal(g, k, log, 0, d));
    state = update_ds_private(state, signals, d, tau, g);
    CHECK(state.records(0, 1) == std::vector<DefectionRecord>{{0, 1, 0}});
    CHECK(state.records(1, 0) == std::vector<DefectionRecord>{{0, 1, 0}});
}

TEST_CASE("coordinated durations implement the overlap deadline") {
    // Complete digraph on 5 nodes minus the 0<->4 edges, so node 4's slow
    // accusation does not enter mdel_0. In-neighbors of 0 hear the defection
    // (0,1) after 0, 1, 2 stages; mdel_0 = 2 and tau = 3 put the deadline at 5.
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < 5; ++u)
        for (NodeId v = 0; v < 5; ++v) {
            if (u == v) continue;
            if ((u == 0 && v == 4) || (u == 4 && v == 0)) continue;
            edges.emplace_back(u, v);
        }
    OverlayGraph g = OverlayGraph::build(5, edges, {0, 1, 2, 3, 4});
    DelayModelConfig cfg;
    cfg.overrides.push_back({2, 0, 1, 1});
    cfg.overrides.push_back({3, 0, 1, 2});
    cfg.overrides.push_back({4, 0, 1, 5});
    DelayMatrix d = compute_delays(g, cfg);

    DurationPolicy policy = coordinated_durations(g, d, 3);
    int e = g.edge_index(0, 1);
    CHECK(policy.mdel()[0] == 2);
    // pair (2,1): latest observer delay is max(1,0) = 1 -> duration 2+3-1 = 4
    CHECK(policy.duration(e, 2, 1) == 4);
    // pair (1,0): both instant -> full window 5
    CHECK(policy.duration(e, 1, 0) == 5);
    // pair (4,1): observer 4 hears at the deadline -> no reaction
    CHECK(policy.duration(e, 4, 1) == 0);
    CHECK(enforces_coordination(policy, d, g));
}

TEST_CASE("all-zero delays reproduce the public duration") {
    OverlayGraph g = pair_graph();
    DelayMatrix d = compute_delays(g);
    DurationPolicy policy = coordinated_durations(g, d, 4);
    CHECK(policy.mdel()[0] == 0);
    CHECK(policy.duration(g.edge_index(0, 1), 0, 1) == 4);
    CHECK(enforces_coordination(policy, d, g));
}

TEST_CASE("coordination fails when an in-neighbor can never be informed") {
    // 2 -> 0 is an edge but the accusation (0,1) never reaches 2.
    OverlayGraph g = OverlayGraph::build(3, {{0, 1}, {2, 0}}, {0, 2});
    DelayMatrix d = compute_delays(g);
    CHECK_THROWS_AS(coordinated_durations(g, d, 3), Error);
}

TEST_CASE("disjoint punishment windows are detected") {
    // In-neighbors of 0 hear the defection (0,1) after 0 and 2 stages; a
    // uniform one-stage reaction gives windows {1} and {3}.
    OverlayGraph g = OverlayGraph::build(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 0}}, {0});
    DelayMatrix d = compute_delays(g);
    REQUIRE(delay_of(g, d, 3, 0, 1) == 2);
    DurationPolicy uniform = DurationPolicy::uniform(1);
    CHECK_FALSE(enforces_coordination(uniform, d, g));
    DurationPolicy coordinated = coordinated_durations(g, d, 1);
    CHECK(enforces_coordination(coordinated, d, g));
}

TEST_CASE("single in-neighbor always overlaps with itself") {
    OverlayGraph g = OverlayGraph::build(2, {{0, 1}, {1, 0}}, {0});
    DelayMatrix d = compute_delays(g);
    CHECK(enforces_coordination(DurationPolicy::uniform(1), d, g));
}
