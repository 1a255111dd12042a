#include "epigame/monitoring.hpp"

namespace epigame {

SignalVerdict public_signal(const OverlayGraph& g, const ForwardProfile& thresholds,
                            const ForwardProfile& played) {
    SignalVerdict s(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [u, v] = g.edges()[e];
        s.defect[e] = played.node[u][v] < thresholds.node[u][v];
    }
    return s;
}

SignalVerdict private_signal(const OverlayGraph& g, NodeId observer,
                             const std::vector<DefectionEvent>& event_log, int current_stage,
                             const DelayMatrix& delays) {
    SignalVerdict s(g.edge_count());
    for (const DefectionEvent& ev : event_log) {
        int e = g.edge_index(ev.accused, ev.victim);
        int del = delays.get(observer, e);
        if (del == kInfiniteDelay) continue;
        if (ev.stage + del == current_stage) s.defect[e] = 1;
    }
    return s;
}

}  // namespace epigame
