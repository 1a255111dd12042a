#pragma once

#include <vector>

#include "epigame/epidemic.hpp"
#include "epigame/graph.hpp"

namespace epigame {

// Per-edge cooperate/defect verdicts. Indexed by the graph's edge order;
// entries exist exactly for node edges (the source is honest by assumption).
struct SignalVerdict {
    std::vector<std::uint8_t> defect;

    explicit SignalVerdict(int edge_count = 0) : defect(edge_count, 0) {}
    bool any() const {
        for (auto f : defect)
            if (f) return true;
        return false;
    }
    bool operator==(const SignalVerdict&) const = default;
};

// A recorded deviation: `accused` forwarded below threshold toward `victim`
// in stage `stage`. Histories in this model are fully characterized by their
// defection events, so the append-only log is the canonical history encoding.
struct DefectionEvent {
    NodeId accused = 0;
    NodeId victim = 0;
    int stage = 0;

    bool operator==(const DefectionEvent&) const = default;
};

// Perfect public monitoring: cooperate iff the played probability meets the
// common-knowledge threshold.
SignalVerdict public_signal(const OverlayGraph& g, const ForwardProfile& thresholds,
                            const ForwardProfile& played);

// Delayed private monitoring: observer sees the defection on edge (j, k)
// exactly delay(observer, j, k) stages after it happened; an infinite delay
// means the observer reports cooperate forever.
SignalVerdict private_signal(const OverlayGraph& g, NodeId observer,
                             const std::vector<DefectionEvent>& event_log, int current_stage,
                             const DelayMatrix& delays);

}  // namespace epigame
