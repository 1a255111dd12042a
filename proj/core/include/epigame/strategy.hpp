#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "epigame/monitoring.hpp"

namespace epigame {

// Reaction Set: the nodes expected to react to a defection of `accused` from
// `victim`. Direct reciprocity is {accused, victim}; full indirect adds every
// in-neighbor of the accused plus the source when it feeds the accused.
struct ReactionSetConfig {
    enum class Mode { Direct, FullIndirect, Custom };

    Mode mode = Mode::FullIndirect;
    std::map<std::pair<NodeId, NodeId>, std::set<NodeId>> custom_sets;

    bool contains(const OverlayGraph& g, NodeId accused, NodeId victim, NodeId member) const;
    bool contains_source(const OverlayGraph& g, NodeId accused, NodeId victim) const;
};

// How long a reaction to a given defection lasts, in stages. base_tau applies
// uniformly; grim never expires; under private monitoring coordinated
// durations fill the per-(defection edge, holder pair) table so that every
// reaction to a defection ends in the same stage.
class DurationPolicy {
public:
    static DurationPolicy uniform(int tau);
    static DurationPolicy grim_trigger();

    bool is_grim() const { return grim_; }
    int base_tau() const { return base_tau_; }
    bool has_pair_table() const { return !per_pair_.empty(); }

    // Duration of the reaction of the holder pair (a, b) to a defection on
    // `defection_edge`. Symmetric in (a, b).
    int duration(int defection_edge, NodeId a, NodeId b) const;

    void set_pair_duration(int defection_edge, NodeId a, NodeId b, int stages);

    // Filled by coordinated_durations: per-node maximum accusation delay.
    const std::vector<int>& mdel() const { return mdel_; }
    void set_mdel(std::vector<int> m) { mdel_ = std::move(m); }

private:
    bool grim_ = false;
    int base_tau_ = 1;
    std::map<std::uint64_t, int> per_pair_;
    std::vector<int> mdel_;

    static std::uint64_t pair_key(int defection_edge, NodeId a, NodeId b);
};

// One tracked defection: (accused, victim, age). Under private monitoring the
// age may be negative while the holder waits for its peer to be informed; the
// record only drives thresholds once the age is >= 0.
struct DefectionRecord {
    NodeId accused = 0;
    NodeId victim = 0;
    int age = 0;

    auto operator<=>(const DefectionRecord&) const = default;
};

// Per-(holder, peer) sets of defection records: what the holder tracks on
// behalf of its relationship with the peer. The source appears as an extra
// holder slot for the edges it feeds, under public monitoring only.
class PunishState {
public:
    PunishState() = default;
    explicit PunishState(int node_count) : n_(node_count), records_((node_count + 1) * node_count) {}

    const std::vector<DefectionRecord>& records(NodeId holder, NodeId peer) const {
        return records_[pair_index(holder, peer)];
    }
    std::vector<DefectionRecord>& records(NodeId holder, NodeId peer) {
        return records_[pair_index(holder, peer)];
    }

    int node_count() const { return n_; }
    bool empty() const;

    bool operator==(const PunishState&) const = default;

private:
    std::size_t pair_index(NodeId holder, NodeId peer) const {
        int h = (holder == kSourceId) ? n_ : holder;
        return static_cast<std::size_t>(h) * n_ + peer;
    }

    int n_ = 0;
    std::vector<std::vector<DefectionRecord>> records_;
};

// One public-monitoring step: surviving records age by one and expire at
// their duration; each defect verdict inserts a fresh age-0 record into every
// pair whose two members both belong to the defection's Reaction Set.
PunishState update_ds_public(const PunishState& state, const SignalVerdict& signal,
                             const ReactionSetConfig& rs, const DurationPolicy& tau,
                             const OverlayGraph& g);

// One private-monitoring step for every holder at once. A holder that
// observes a defection inserts the record at age min(del_holder - del_peer, 0)
// so the pair activates it exactly when both ends know; peers that can never
// be informed suppress the record entirely.
PunishState update_ds_private(const PunishState& state,
                              const std::vector<SignalVerdict>& signals_per_observer,
                              const DelayMatrix& delays, const DurationPolicy& tau,
                              const OverlayGraph& g);

// Threshold profile induced by a punish state: an edge u->v carries
// probability 0 while the pair's active records accuse either endpoint
// (u's own recent defection, or v being punished); otherwise the baseline.
ForwardProfile threshold_profile(const PunishState& state, const ForwardProfile& baseline,
                                 const OverlayGraph& g);

// Builds the per-pair duration table of coordinated punishments: every
// reaction to a defection of i ends in stage mdel_i + tau, so reactions of
// all in-neighbors overlap. Fails when some in-neighbor of a node can never
// be informed of one of its defections.
DurationPolicy coordinated_durations(const OverlayGraph& g, const DelayMatrix& delays, int tau);

// True iff for every edge (i, j) the punishment windows of all in-neighbors
// of i share at least one stage.
bool enforces_coordination(const DurationPolicy& policy, const DelayMatrix& delays,
                           const OverlayGraph& g);

namespace testing {
// CI self-test hook: widens the DS expiry by one stage so the expiry suite
// must fail. Never set outside verify-lemmas fault injection.
void set_ds_expiry_fault(bool enabled);
}  // namespace testing

}  // namespace epigame
