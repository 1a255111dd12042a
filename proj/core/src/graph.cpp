#include "epigame/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace epigame {

OverlayGraph OverlayGraph::build(int node_count,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges,
                                 const std::vector<NodeId>& source_targets) {
    if (node_count <= 0) fail(Errc::InvalidArgument, "graph needs at least one node");
    if (source_targets.empty()) fail(Errc::InvalidArgument, "source_targets must be non-empty");

    OverlayGraph g;
    g.n_ = node_count;
    g.out_.resize(node_count);
    g.in_.resize(node_count);
    g.adj_.assign(static_cast<std::size_t>(node_count) * node_count, 0);
    g.source_target_mask_.assign(node_count, 0);

    auto check_node = [&](NodeId v, const char* what) {
        if (v < 0 || v >= node_count)
            fail(Errc::InvalidArgument, std::string(what) + " index " + std::to_string(v) + " out of range");
    };

    for (auto [u, v] : edges) {
        check_node(u, "edge tail");
        check_node(v, "edge head");
        if (u == v) fail(Errc::SelfLoop, "self loop at node " + std::to_string(u));
        if (g.adj_[u * node_count + v])
            fail(Errc::DuplicateEdge, "duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
        g.adj_[u * node_count + v] = 1;
        g.out_[u].push_back(v);
        g.in_[v].push_back(u);
    }
    for (auto& nb : g.out_) std::sort(nb.begin(), nb.end());
    for (auto& nb : g.in_) std::sort(nb.begin(), nb.end());

    std::set<NodeId> targets;
    for (NodeId t : source_targets) {
        check_node(t, "source target");
        targets.insert(t);
    }
    g.source_targets_.assign(targets.begin(), targets.end());
    for (NodeId t : g.source_targets_) g.source_target_mask_[t] = 1;

    for (NodeId u = 0; u < node_count; ++u)
        for (NodeId v : g.out_[u]) g.edges_.emplace_back(u, v);

    // Connectivity from the source is an invariant, not a soft warning.
    std::vector<char> seen(node_count, 0);
    std::deque<NodeId> queue(g.source_targets_.begin(), g.source_targets_.end());
    for (NodeId t : g.source_targets_) seen[t] = 1;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : g.out_[u])
            if (!seen[v]) {
                seen[v] = 1;
                queue.push_back(v);
            }
    }
    for (NodeId v = 0; v < node_count; ++v)
        if (!seen[v])
            fail(Errc::DisconnectedFromSource, "node " + std::to_string(v) + " unreachable from the source");

    return g;
}

int OverlayGraph::edge_index(NodeId u, NodeId v) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(u, v));
    if (it == edges_.end() || *it != std::make_pair(u, v))
        fail(Errc::NotAnEdge, "(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
    return static_cast<int>(it - edges_.begin());
}

bool OverlayGraph::path_exists_avoiding(NodeId from, NodeId to, std::optional<NodeId> avoid) const {
    if (avoid && (*avoid == from || *avoid == to)) return false;
    if (from == to) return true;

    std::vector<char> seen(n_, 0);
    std::deque<NodeId> queue;
    auto push = [&](NodeId v) {
        if (v == to) return true;
        if (!seen[v] && !(avoid && *avoid == v)) {
            seen[v] = 1;
            queue.push_back(v);
        }
        return false;
    };

    if (from == kSourceId) {
        for (NodeId t : source_targets_)
            if (push(t)) return true;
    } else {
        for (NodeId v : out_[from])
            if (push(v)) return true;
    }
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : out_[u])
            if (push(v)) return true;
    }
    return false;
}

namespace {

// Backtracking search for a simple path source -> ... -> via -> ... -> to.
// Finding two internally disjoint directed paths is hard in general, but at
// analyzer scale (n <= 14) plain DFS with reachability pruning is instant.
struct ViaSearch {
    const OverlayGraph& g;
    NodeId via, to;
    std::vector<char> visited;

    bool reachable_unvisited(NodeId from, NodeId target) const {
        if (from == target) return true;
        std::vector<char> seen(g.node_count(), 0);
        std::deque<NodeId> queue;
        auto expand = [&](NodeId v) {
            if (v == target) return true;
            if (!seen[v] && !visited[v]) {
                seen[v] = 1;
                queue.push_back(v);
            }
            return false;
        };
        auto start = [&](NodeId f) {
            if (f == kSourceId) {
                for (NodeId t : g.source_targets())
                    if (expand(t)) return true;
            } else {
                for (NodeId v : g.out_neighbors(f))
                    if (expand(v)) return true;
            }
            return false;
        };
        if (start(from)) return true;
        while (!queue.empty()) {
            NodeId u = queue.front();
            queue.pop_front();
            for (NodeId v : g.out_neighbors(u))
                if (expand(v)) return true;
        }
        return false;
    }

    bool dfs(NodeId at, bool via_hit) {
        if (at == to) return via_hit || at == via;
        if (!via_hit && at != via && !reachable_unvisited(at, via)) return false;
        if ((via_hit || at == via) && !reachable_unvisited(at, to)) return false;
        const auto& next = (at == kSourceId) ? g.source_targets() : g.out_neighbors(at);
        for (NodeId v : next) {
            if (visited[v]) continue;
            visited[v] = 1;
            if (dfs(v, via_hit || at == via || v == via)) return true;
            visited[v] = 0;
        }
        return false;
    }
};

}  // namespace

bool OverlayGraph::lies_on_source_path(NodeId via, NodeId to) const {
    if (via == to) return path_exists_avoiding(kSourceId, to, std::nullopt);
    ViaSearch search{*this, via, to, std::vector<char>(n_, 0)};
    return search.dfs(kSourceId, false);
}

bool OverlayGraph::punishment_can_impact(NodeId i, NodeId j) const {
    if (!has_edge(i, j)) fail(Errc::NotAnEdge, "punishment_can_impact requires edge (i,j)");
    for (NodeId k = 0; k < n_; ++k) {
        if (k == i) continue;
        if (!lies_on_source_path(k, i)) continue;
        if (k == j || path_exists_avoiding(j, k, i)) return true;
    }
    return false;
}

bool OverlayGraph::is_redundant() const {
    for (NodeId i = 0; i < n_; ++i)
        for (NodeId j = 0; j < n_; ++j) {
            if (j == i) continue;
            if (!path_exists_avoiding(kSourceId, i, j)) return false;
        }
    return true;
}

bool OverlayGraph::supports_full_indirect(NodeId i) const {
    for (NodeId j : out_[i])
        for (NodeId k : in_[i]) {
            if (j == k) continue;
            if (!path_exists_avoiding(j, k, i)) return false;
        }
    return true;
}

DelayMatrix compute_delays(const OverlayGraph& g, const DelayModelConfig& config) {
    const int n = g.node_count();
    DelayMatrix d(n, g.edge_count());

    for (int e = 0; e < g.edge_count(); ++e) {
        auto [i, j] = g.edges()[e];
        // BFS from the victim j on the graph with the accused i removed.
        std::vector<int> dist(n, kInfiniteDelay);
        std::deque<NodeId> queue;
        dist[j] = 0;
        queue.push_back(j);
        while (!queue.empty()) {
            NodeId u = queue.front();
            queue.pop_front();
            for (NodeId v : g.out_neighbors(u)) {
                if (v == i || dist[v] != kInfiniteDelay) continue;
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
        for (NodeId k = 0; k < n; ++k) d.set(k, e, dist[k]);
        d.set(i, e, 0);
        d.set(j, e, 0);
    }

    for (const auto& ov : config.overrides) {
        int e = g.edge_index(ov.accused, ov.victim);
        if ((ov.observer == ov.accused || ov.observer == ov.victim) && ov.delay != 0)
            fail(Errc::InvalidOverride,
                 "delay override for observer " + std::to_string(ov.observer) +
                     " on edge (" + std::to_string(ov.accused) + "," + std::to_string(ov.victim) +
                     ") must be 0: endpoints are informed instantly");
        if (ov.observer < 0 || ov.observer >= n)
            fail(Errc::InvalidOverride, "delay override observer out of range");
        if (ov.delay < 0) fail(Errc::InvalidOverride, "delay override must be non-negative");
        d.set(ov.observer, e, ov.delay);
    }
    return d;
}

int delay_of(const OverlayGraph& g, const DelayMatrix& d, NodeId observer, NodeId accused, NodeId victim) {
    return d.get(observer, g.edge_index(accused, victim));
}

int max_accusation_delay(const OverlayGraph& g, const DelayMatrix& d, NodeId i) {
    int worst = 0;
    for (NodeId j : g.out_neighbors(i)) {
        int e = g.edge_index(i, j);
        for (NodeId k : g.in_neighbors(i)) {
            int del = d.get(k, e);
            if (del == kInfiniteDelay) return kInfiniteDelay;
            worst = std::max(worst, del);
        }
    }
    return worst;
}

}  // namespace epigame
