#include "rallnet/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <set>

#include "rallnet/costs.hpp"

namespace rallnet {

namespace {

std::vector<int> bfs_distances(const Topology& t) {
    const int n = t.node_count();
    std::vector<std::vector<NodeId>> rev(n);
    for (const DirectedLink& l : t.links) rev[l.dst].push_back(l.src);
    for (auto& v : rev) std::sort(v.begin(), v.end());
    std::vector<int> dist(n, -1);
    std::deque<NodeId> queue{t.sink};
    dist[t.sink] = 0;
    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        for (NodeId u : rev[v]) {
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

Path follow_descent(const Topology& t, NodeId src, const std::vector<int>& level) {
    // Walk from src toward the sink, always taking the smallest-id neighbor
    // one BFS level down.
    Path p;
    p.source = src;
    NodeId u = src;
    while (u != t.sink) {
        NodeId next = -1;
        for (int li : t.out_links(u)) {  // out_links ordered by dst
            const NodeId v = t.links[li].dst;
            if (level[v] == level[u] - 1) {
                next = v;
                p.hops.push_back(t.links[li]);
                break;
            }
        }
        u = next;
    }
    return p;
}

}  // namespace

OracleResult min_total_hops(const Topology& t) {
    const std::vector<int> dist = bfs_distances(t);
    long total = 0;
    std::map<NodeId, Path> assignment;
    for (NodeId v = 0; v < t.node_count(); ++v) {
        if (v == t.sink) continue;
        if (dist[v] < 0) throw Unreachable("node " + std::to_string(v) + " cannot reach the sink");
        total += dist[v];
        assignment.emplace(v, follow_descent(t, v, dist));
    }
    return {static_cast<double>(total), std::move(assignment)};
}

namespace {

// Integer Dijkstra on quality-penalty units, ties by (hops, node sequence).
struct UnitLabel {
    long units = 0;
    int hops = 0;
    std::vector<NodeId> seq;
    bool better_than(const UnitLabel& o) const {
        if (units != o.units) return units < o.units;
        if (hops != o.hops) return hops < o.hops;
        return seq < o.seq;
    }
    bool same_as(const UnitLabel& o) const {
        return units == o.units && hops == o.hops && seq == o.seq;
    }
};

std::optional<UnitLabel> min_unit_path(const Topology& t, NodeId src, int th_lqi) {
    struct Entry {
        UnitLabel label;
        NodeId node;
    };
    struct After {
        bool operator()(const Entry& a, const Entry& b) const {
            return b.label.better_than(a.label);
        }
    };
    std::vector<std::optional<UnitLabel>> best(t.node_count());
    std::priority_queue<Entry, std::vector<Entry>, After> pq;
    best[src] = UnitLabel{0, 0, {src}};
    pq.push({*best[src], src});
    while (!pq.empty()) {
        Entry e = pq.top();
        pq.pop();
        const NodeId u = e.node;
        if (!best[u] || !best[u]->same_as(e.label)) continue;
        if (u == t.sink) break;
        for (int li : t.out_links(u)) {
            const NodeId v = t.links[li].dst;
            UnitLabel cand{e.label.units + lqi_penalty_units(t.links[li].lqi, th_lqi),
                           e.label.hops + 1, e.label.seq};
            cand.seq.push_back(v);
            if (!best[v] || cand.better_than(*best[v])) {
                best[v] = cand;
                pq.push({std::move(cand), v});
            }
        }
    }
    return best[t.sink];
}

Path path_from_sequence(const Topology& t, const std::vector<NodeId>& seq) {
    Path p;
    p.source = seq.front();
    for (size_t i = 0; i + 1 < seq.size(); ++i)
        p.hops.push_back(t.links[t.link_index(seq[i], seq[i + 1])]);
    return p;
}

}  // namespace

long min_lqi_units(const Topology& t, int th_lqi) {
    long total = 0;
    for (NodeId v = 0; v < t.node_count(); ++v) {
        if (v == t.sink) continue;
        auto label = min_unit_path(t, v, th_lqi);
        if (!label) throw Unreachable("node " + std::to_string(v) + " cannot reach the sink");
        total += label->units;
    }
    return total;
}

OracleResult min_lqi_cost(const Topology& t, int th_lqi) {
    long total = 0;
    std::map<NodeId, Path> assignment;
    for (NodeId v = 0; v < t.node_count(); ++v) {
        if (v == t.sink) continue;
        auto label = min_unit_path(t, v, th_lqi);
        if (!label) throw Unreachable("node " + std::to_string(v) + " cannot reach the sink");
        total += label->units;
        assignment.emplace(v, path_from_sequence(t, label->seq));
    }
    return {static_cast<double>(total) / th_lqi, std::move(assignment)};
}

std::vector<Path> enumerate_simple_paths(const Topology& t, NodeId src, NodeId sink) {
    std::vector<Path> out;
    std::vector<char> visited(t.node_count(), 0);
    std::vector<NodeId> seq{src};
    visited[src] = 1;

    auto dfs = [&](auto&& self, NodeId u) -> void {
        if (u == sink) {
            out.push_back(path_from_sequence(t, seq));
            return;
        }
        for (int li : t.out_links(u)) {
            const NodeId v = t.links[li].dst;
            if (visited[v]) continue;
            visited[v] = 1;
            seq.push_back(v);
            self(self, v);
            seq.pop_back();
            visited[v] = 0;
        }
    };
    dfs(dfs, src);

    std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
        if (a.hops.size() != b.hops.size()) return a.hops.size() < b.hops.size();
        return a.node_sequence() < b.node_sequence();
    });
    return out;
}

OracleResult min_bottleneck_exact(const Topology& t, int max_nodes) {
    if (t.node_count() > max_nodes)
        throw TooLarge("bottleneck oracle capped at " + std::to_string(max_nodes) + " nodes");

    std::vector<NodeId> sources;
    std::vector<std::vector<Path>> choices;
    for (NodeId v = 0; v < t.node_count(); ++v) {
        if (v == t.sink) continue;
        sources.push_back(v);
        choices.push_back(enumerate_simple_paths(t, v, t.sink));
        if (choices.back().empty())
            throw Unreachable("node " + std::to_string(v) + " cannot reach the sink");
    }
    // Most-constrained flows first shrink the search tree.
    std::vector<size_t> order(sources.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (choices[a].size() != choices[b].size()) return choices[a].size() < choices[b].size();
        return sources[a] < sources[b];
    });

    // Every flow's last hop loads an in-neighbor of the sink.
    int sink_in_degree = 0;
    for (const DirectedLink& l : t.links) sink_in_degree += l.dst == t.sink;
    const int static_lb =
        static_cast<int>((sources.size() + sink_in_degree - 1) / sink_in_degree);

    std::vector<int> load(t.node_count(), 0);
    std::vector<size_t> pick(sources.size(), 0);
    std::vector<size_t> best_pick;
    int best = std::numeric_limits<int>::max();

    auto search = [&](auto&& self, size_t depth, int running_max) -> void {
        if (best == static_lb) return;  // already optimal
        int bound = running_max;
        for (size_t d = depth; d < order.size(); ++d)
            bound = std::max(bound, load[sources[order[d]]] + 1);  // own flow still to come
        if (bound >= best) return;
        if (depth == order.size()) {
            best = running_max;
            best_pick = pick;
            return;
        }
        const size_t flow = order[depth];
        for (size_t c = 0; c < choices[flow].size(); ++c) {
            const Path& p = choices[flow][c];
            int new_max = running_max;
            for (const DirectedLink& hop : p.hops) {
                load[hop.src] += 1;
                new_max = std::max(new_max, load[hop.src]);
            }
            pick[flow] = c;
            self(self, depth + 1, new_max);
            for (const DirectedLink& hop : p.hops) load[hop.src] -= 1;
            if (best == static_lb) return;
        }
    };
    search(search, 0, 0);

    std::map<NodeId, Path> assignment;
    for (size_t i = 0; i < sources.size(); ++i)
        assignment.emplace(sources[i], choices[i][best_pick[i]]);
    return {static_cast<double>(best), std::move(assignment)};
}

long eval_total_hops(const RoutingTable& rt) {
    long total = 0;
    for (const auto& [src, path] : rt.paths) total += path.length();
    return total;
}

long eval_lqi_units(const RoutingTable& rt, int th_lqi) {
    long total = 0;
    for (const auto& [src, path] : rt.paths)
        for (const DirectedLink& hop : path.hops) total += lqi_penalty_units(hop.lqi, th_lqi);
    return total;
}

int eval_bottleneck(const RoutingTable& rt) {
    // Recounted from the paths, independent of the table's own tallies.
    std::map<NodeId, int> load;
    for (const auto& [src, path] : rt.paths)
        for (const DirectedLink& hop : path.hops) load[hop.src] += 1;
    int m = 0;
    for (const auto& [node, l] : load) m = std::max(m, l);
    return m;
}

bool assignment_feasible(const Topology& t, const std::map<NodeId, Path>& assignment) {
    for (NodeId v = 0; v < t.node_count(); ++v) {
        if (v == t.sink) continue;
        auto it = assignment.find(v);
        if (it == assignment.end()) return false;
        const Path& p = it->second;
        if (p.source != v || p.hops.empty()) return false;
        if (p.hops.front().src != v || p.hops.back().dst != t.sink) return false;
        std::set<NodeId> seen{v};
        for (size_t i = 0; i < p.hops.size(); ++i) {
            const DirectedLink& hop = p.hops[i];
            if (i > 0 && hop.src != p.hops[i - 1].dst) return false;
            if (t.lqi_at(hop.src, hop.dst) != hop.lqi) return false;
            if (!seen.insert(hop.dst).second) return false;  // repeated node
        }
    }
    return true;
}

}  // namespace rallnet
