#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epigame/errors.hpp"

namespace epigame {

// Nodes are dense integers 0..n-1. The external source is a sentinel that is
// never a member of the node set; it only appears as the tail of source edges.
using NodeId = int;
inline constexpr NodeId kSourceId = -1;

inline constexpr int kInfiniteDelay = std::numeric_limits<int>::max();

// Directed overlay with a distinguished external source. Immutable after
// construction; safe to share read-only across parallel workers.
class OverlayGraph {
public:
    OverlayGraph() = default;  // empty placeholder; real graphs come from build()

    static OverlayGraph build(int node_count,
                              const std::vector<std::pair<NodeId, NodeId>>& edges,
                              const std::vector<NodeId>& source_targets);

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const std::vector<NodeId>& out_neighbors(NodeId i) const { return out_[i]; }
    const std::vector<NodeId>& in_neighbors(NodeId i) const { return in_[i]; }
    const std::vector<NodeId>& source_targets() const { return source_targets_; }

    bool has_edge(NodeId u, NodeId v) const { return adj_[u * n_ + v]; }
    bool is_source_target(NodeId v) const { return source_target_mask_[v]; }

    // Directed node edges in a fixed (u, v) lexicographic order.
    const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
    int edge_index(NodeId u, NodeId v) const;

    // True iff a directed path from `from` (a node or kSourceId) to `to`
    // exists that never touches `avoid`. Endpoints count: from == avoid or
    // to == avoid yields false.
    bool path_exists_avoiding(NodeId from, NodeId to,
                              std::optional<NodeId> avoid = std::nullopt) const;

    // True iff some simple path from the source to `to` passes through `via`.
    bool lies_on_source_path(NodeId via, NodeId to) const;

    // True iff a defection on edge (i, j) can ever be punished with impact:
    // some node k != i sits on a source->i path and is reachable from the
    // victim j without crossing i.
    bool punishment_can_impact(NodeId i, NodeId j) const;

    // Every node keeps a source path avoiding any single other node.
    bool is_redundant() const;

    // Every out-neighbor of i can reach every in-neighbor of i avoiding i.
    bool supports_full_indirect(NodeId i) const;

private:
    int n_ = 0;
    std::vector<std::vector<NodeId>> out_, in_;
    std::vector<NodeId> source_targets_;
    std::vector<char> source_target_mask_;
    std::vector<char> adj_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
};

// Accusation delays: delay(observer k, accused i, victim j) is the number of
// stages after which k learns that i defected from j, or kInfiniteDelay if
// the accusation can never reach k. Entries exist for every edge (i, j).
class DelayMatrix {
public:
    DelayMatrix() = default;
    DelayMatrix(int node_count, int edge_count)
        : n_(node_count), entries_(static_cast<std::size_t>(node_count) * edge_count, kInfiniteDelay) {}

    int get(NodeId observer, int edge_idx) const {
        return entries_[static_cast<std::size_t>(observer) * edge_stride() + edge_idx];
    }
    void set(NodeId observer, int edge_idx, int delay) {
        entries_[static_cast<std::size_t>(observer) * edge_stride() + edge_idx] = delay;
    }

    int node_count() const { return n_; }

private:
    std::size_t edge_stride() const { return entries_.size() / static_cast<std::size_t>(n_); }

    int n_ = 0;
    std::vector<int> entries_;
};

struct DelayOverride {
    NodeId observer = 0;
    NodeId accused = 0;
    NodeId victim = 0;
    int delay = 0;  // kInfiniteDelay for "inf"
};

struct DelayModelConfig {
    // Default model: hop count of the shortest victim->observer path that
    // avoids the accused; infinite when no such path exists.
    std::vector<DelayOverride> overrides;
};

DelayMatrix compute_delays(const OverlayGraph& g, const DelayModelConfig& config = {});

// Convenience accessor with edge lookup baked in.
int delay_of(const OverlayGraph& g, const DelayMatrix& d, NodeId observer, NodeId accused, NodeId victim);

// Maximum delay of accusations against i toward any in-neighbor of i.
// Returns kInfiniteDelay when some in-neighbor can never be informed.
int max_accusation_delay(const OverlayGraph& g, const DelayMatrix& d, NodeId i);

}  // namespace epigame
