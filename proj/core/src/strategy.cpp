#include "epigame/strategy.hpp"

#include <algorithm>

namespace epigame {

namespace {
int g_ds_expiry_slack = 0;
}

namespace testing {
void set_ds_expiry_fault(bool enabled) { g_ds_expiry_slack = enabled ? 1 : 0; }
}  // namespace testing

bool ReactionSetConfig::contains(const OverlayGraph& g, NodeId accused, NodeId victim,
                                 NodeId member) const {
    if (member == accused || member == victim) return true;
    switch (mode) {
        case Mode::Direct:
            return false;
        case Mode::FullIndirect:
            return g.has_edge(member, accused);
        case Mode::Custom: {
            auto it = custom_sets.find({accused, victim});
            return it != custom_sets.end() && it->second.count(member) > 0;
        }
    }
    return false;
}

bool ReactionSetConfig::contains_source(const OverlayGraph& g, NodeId accused, NodeId) const {
    // The source abides to the strategy too: under full indirect reciprocity
    // it reacts like any in-neighbor of the accused.
    return mode == Mode::FullIndirect && g.is_source_target(accused);
}

DurationPolicy DurationPolicy::uniform(int tau) {
    if (tau < 1) fail(Errc::InvalidArgument, "punishment duration must be >= 1");
    DurationPolicy p;
    p.base_tau_ = tau;
    return p;
}

DurationPolicy DurationPolicy::grim_trigger() {
    DurationPolicy p;
    p.grim_ = true;
    return p;
}

std::uint64_t DurationPolicy::pair_key(int defection_edge, NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(defection_edge) << 32) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 16) |
           static_cast<std::uint32_t>(b);
}

int DurationPolicy::duration(int defection_edge, NodeId a, NodeId b) const {
    if (grim_) return kInfiniteDelay;
    if (!per_pair_.empty()) {
        auto it = per_pair_.find(pair_key(defection_edge, a, b));
        if (it != per_pair_.end()) return it->second;
    }
    return base_tau_;
}

void DurationPolicy::set_pair_duration(int defection_edge, NodeId a, NodeId b, int stages) {
    if (stages < 0) fail(Errc::InvalidArgument, "pair duration must be non-negative");
    per_pair_[pair_key(defection_edge, a, b)] = stages;
}

bool PunishState::empty() const {
    for (const auto& recs : records_)
        if (!recs.empty()) return false;
    return true;
}

namespace {

void insert_record(std::vector<DefectionRecord>& recs, DefectionRecord rec) {
    auto it = std::lower_bound(recs.begin(), recs.end(), rec);
    if (it != recs.end() && *it == rec) return;
    recs.insert(it, rec);
}

bool survives(int next_age, int duration) {
    if (duration == kInfiniteDelay) return true;
    return next_age < duration + g_ds_expiry_slack;
}

}  // namespace

PunishState update_ds_public(const PunishState& state, const SignalVerdict& signal,
                             const ReactionSetConfig& rs, const DurationPolicy& tau,
                             const OverlayGraph& g) {
    PunishState next(g.node_count());
    const int dur = tau.is_grim() ? kInfiniteDelay : tau.base_tau();

    auto step_pair = [&](NodeId holder, NodeId peer, bool holder_is_source) {
        const auto& old = state.records(holder, peer);
        auto& fresh = next.records(holder, peer);
        for (DefectionRecord rec : old) {
            ++rec.age;
            if (survives(rec.age, dur)) insert_record(fresh, rec);
        }
        for (int e = 0; e < g.edge_count(); ++e) {
            if (!signal.defect[e]) continue;
            auto [k1, k2] = g.edges()[e];
            bool holder_in = holder_is_source ? rs.contains_source(g, k1, k2)
                                              : rs.contains(g, k1, k2, holder);
            if (holder_in && rs.contains(g, k1, k2, peer))
                insert_record(fresh, {k1, k2, 0});
        }
    };

    for (auto [u, v] : g.edges()) step_pair(u, v, false);
    for (NodeId v : g.source_targets()) step_pair(kSourceId, v, true);
    return next;
}

PunishState update_ds_private(const PunishState& state,
                              const std::vector<SignalVerdict>& signals_per_observer,
                              const DelayMatrix& delays, const DurationPolicy& tau,
                              const OverlayGraph& g) {
    const int n = g.node_count();
    PunishState next(n);

    for (NodeId holder = 0; holder < n; ++holder) {
        std::vector<NodeId> peers(g.out_neighbors(holder));
        for (NodeId p : g.in_neighbors(holder))
            if (!g.has_edge(holder, p)) peers.push_back(p);

        for (NodeId peer : peers) {
            const auto& old = state.records(holder, peer);
            auto& fresh = next.records(holder, peer);
            for (DefectionRecord rec : old) {
                int dur = tau.duration(g.edge_index(rec.accused, rec.victim), holder, peer);
                ++rec.age;
                if (survives(rec.age, dur)) insert_record(fresh, rec);
            }
            const SignalVerdict& sig = signals_per_observer[holder];
            for (int e = 0; e < g.edge_count(); ++e) {
                if (!sig.defect[e]) continue;
                auto [k1, k2] = g.edges()[e];
                int del_holder = delays.get(holder, e);
                int del_peer = delays.get(peer, e);
                if (del_peer == kInfiniteDelay) continue;  // peer never learns
                int start_age = std::min(del_holder - del_peer, 0);
                int dur = tau.duration(e, holder, peer);
                if (dur != kInfiniteDelay && start_age >= dur) continue;  // zero-length reaction
                insert_record(fresh, {k1, k2, start_age});
            }
        }
    }
    return next;
}

ForwardProfile threshold_profile(const PunishState& state, const ForwardProfile& baseline,
                                 const OverlayGraph& g) {
    ForwardProfile out = baseline;
    auto zeroed = [&](NodeId holder, NodeId peer, NodeId forwarder, NodeId receiver) {
        for (const DefectionRecord& rec : state.records(holder, peer)) {
            if (rec.age < 0) continue;
            if (rec.accused == forwarder || rec.accused == receiver) return true;
        }
        return false;
    };
    for (auto [u, v] : g.edges())
        if (zeroed(u, v, u, v)) out.node[u][v] = 0.0;
    for (NodeId v : g.source_targets())
        if (zeroed(kSourceId, v, kSourceId, v)) out.source[v] = 0.0;
    return out;
}

DurationPolicy coordinated_durations(const OverlayGraph& g, const DelayMatrix& delays, int tau) {
    if (tau < 1) fail(Errc::InvalidArgument, "tau must be >= 1");
    const int n = g.node_count();

    std::vector<int> mdel(n, 0);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j : g.out_neighbors(i)) {
            int e = g.edge_index(i, j);
            for (NodeId k : g.in_neighbors(i)) {
                int del = delays.get(k, e);
                if (del == kInfiniteDelay)
                    fail(Errc::UnpunishableNode,
                         "in-neighbor " + std::to_string(k) + " of node " + std::to_string(i) +
                             " can never be informed of a defection on edge (" + std::to_string(i) +
                             "," + std::to_string(j) + "); coordination is impossible");
                mdel[i] = std::max(mdel[i], del);
            }
        }
    }

    DurationPolicy policy = DurationPolicy::uniform(tau);
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [i, j] = g.edges()[e];
        const int deadline = mdel[i] + tau;
        for (NodeId a = 0; a < n; ++a) {
            std::vector<NodeId> peers(g.out_neighbors(a));
            for (NodeId p : g.in_neighbors(a))
                if (!g.has_edge(a, p)) peers.push_back(p);
            int del_a = delays.get(a, e);
            for (NodeId b : peers) {
                if (b < a) continue;  // symmetric pair, fill once
                int del_b = delays.get(b, e);
                if (del_a == kInfiniteDelay || del_b == kInfiniteDelay) continue;
                int latest = std::max(del_a, del_b);
                policy.set_pair_duration(e, a, b, latest < deadline ? deadline - latest : 0);
            }
        }
    }
    policy.set_mdel(std::move(mdel));
    return policy;
}

bool enforces_coordination(const DurationPolicy& policy, const DelayMatrix& delays,
                           const OverlayGraph& g) {
    for (auto [i, j] : g.edges()) {
        int e = g.edge_index(i, j);
        if (g.in_neighbors(i).empty()) continue;
        long long lo = 1, hi = std::numeric_limits<long long>::max();
        for (NodeId k : g.in_neighbors(i)) {
            int del = delays.get(k, e);
            if (del == kInfiniteDelay) return false;
            int dur = policy.duration(e, k, i);
            if (dur == 0) return false;
            lo = std::max(lo, static_cast<long long>(del) + 1);
            if (dur != kInfiniteDelay)
                hi = std::min(hi, static_cast<long long>(del) + dur);
        }
        if (lo > hi) return false;
    }
    return true;
}

}  // namespace epigame
