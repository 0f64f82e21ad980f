#include "rallnet/routing.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <set>

#include "rallnet/rng.hpp"

namespace rallnet {

std::vector<NodeId> Path::node_sequence() const {
    std::vector<NodeId> seq{source};
    for (const DirectedLink& l : hops) seq.push_back(l.dst);
    return seq;
}

int RoutingTable::max_node_load() const {
    int m = 0;
    for (const auto& [node, load] : node_loads) m = std::max(m, load);
    return m;
}

std::vector<int> hop_distances_to_sink(const Topology& t) {
    const int n = t.node_count();
    std::vector<std::vector<NodeId>> rev(n);
    for (const DirectedLink& l : t.links) rev[l.dst].push_back(l.src);
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

namespace {

// Dijkstra label with the full deterministic tie-break:
// cost, then hop count, then lexicographic node sequence.
struct Label {
    double cost = 0.0;
    int hops = 0;
    std::vector<NodeId> seq;

    bool better_than(const Label& o) const {
        if (cost != o.cost) return cost < o.cost;
        if (hops != o.hops) return hops < o.hops;
        return seq < o.seq;
    }
    bool same_as(const Label& o) const {
        return cost == o.cost && hops == o.hops && seq == o.seq;
    }
};

struct QueueEntry {
    Label label;
    NodeId node = 0;
};

struct QueueAfter {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        return b.label.better_than(a.label);  // min-heap
    }
};

Path path_from_sequence(const Topology& t, const std::vector<NodeId>& seq) {
    Path p;
    p.source = seq.front();
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
        const int li = t.link_index(seq[i], seq[i + 1]);
        p.hops.push_back(t.links[li]);
    }
    return p;
}

// Deterministic Dijkstra over per-link weights. Labels extend monotonically
// (cost never decreases, hops strictly increase), so results are simple paths.
std::optional<Path> min_cost_path(const Topology& t, NodeId src, NodeId sink,
                                  const std::vector<double>& link_weights,
                                  const std::vector<char>* banned_nodes = nullptr,
                                  const std::vector<char>* banned_links = nullptr) {
    const int n = t.node_count();
    std::vector<std::optional<Label>> best(n);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueAfter> pq;
    best[src] = Label{0.0, 0, {src}};
    pq.push({*best[src], src});

    while (!pq.empty()) {
        QueueEntry e = pq.top();
        pq.pop();
        const NodeId u = e.node;
        if (!best[u] || !best[u]->same_as(e.label)) continue;  // stale entry
        if (u == sink) break;
        for (int li : t.out_links(u)) {
            if (banned_links && (*banned_links)[li]) continue;
            const NodeId v = t.links[li].dst;
            if (banned_nodes && (*banned_nodes)[v]) continue;
            Label cand{e.label.cost + link_weights[li], e.label.hops + 1, e.label.seq};
            cand.seq.push_back(v);
            if (!best[v] || cand.better_than(*best[v])) {
                best[v] = cand;
                pq.push({std::move(cand), v});
            }
        }
    }
    if (!best[sink]) return std::nullopt;
    return path_from_sequence(t, best[sink]->seq);
}

RoutingTable finalize_table(std::string algorithm, std::map<NodeId, Path> paths) {
    RoutingTable rt;
    rt.algorithm = std::move(algorithm);
    rt.paths = std::move(paths);
    for (const auto& [src, path] : rt.paths) {
        for (const DirectedLink& hop : path.hops) {
            rt.edge_flows[{hop.src, hop.dst}] += 1;
            rt.node_loads[hop.src] += 1;  // transmitting node carries the flow
        }
    }
    return rt;
}

std::vector<double> unit_weights(const Topology& t) {
    return std::vector<double>(t.link_count(), 1.0);
}

}  // namespace

Path mc_path(NodeId src, NodeId sink, const EdgeCosts& costs, const Topology& t) {
    auto p = min_cost_path(t, src, sink, costs.working);
    if (!p) throw Unreachable("no path from node " + std::to_string(src) + " to sink");
    return *p;
}

std::vector<NodeId> order_flows(const Topology& t, const FlowOrdering& ordering) {
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < t.node_count(); ++v)
        if (v != t.sink) nodes.push_back(v);

    switch (ordering.strategy) {
        case OrderingStrategy::NodeIdAscending:
            break;
        case OrderingStrategy::NearestFirst:
        case OrderingStrategy::FarthestFirst: {
            const std::vector<int> dist = hop_distances_to_sink(t);
            const bool farthest = ordering.strategy == OrderingStrategy::FarthestFirst;
            std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
                if (dist[a] != dist[b]) return farthest ? dist[a] > dist[b] : dist[a] < dist[b];
                return a < b;
            });
            break;
        }
        case OrderingStrategy::RandomSeeded: {
            Rng rng(mix_seed(ordering.seed, {0x0f0f0f0fULL}));
            for (size_t i = nodes.size(); i > 1; --i)
                std::swap(nodes[i - 1], nodes[rng.below(i)]);
            break;
        }
    }
    return nodes;
}

namespace {

RoutingTable greedy_load_loop(std::string name, const Topology& t, EdgeCosts costs,
                              const FlowOrdering& ordering, bool load_feedback) {
    std::map<NodeId, Path> paths;
    for (NodeId s : order_flows(t, ordering)) {
        Path p = mc_path(s, t.sink, costs, t);
        if (load_feedback) update_edges(p.hops, costs);
        paths.emplace(s, std::move(p));
    }
    return finalize_table(std::move(name), std::move(paths));
}

}  // namespace

RoutingTable rall(const Topology& t, const CostParams& params, const FlowOrdering& ordering,
                  bool load_feedback) {
    return greedy_load_loop("rall", t, sum_weights(t, params), ordering, load_feedback);
}

RoutingTable balanced_lqi(const Topology& t, int th_lqi, const FlowOrdering& ordering) {
    return greedy_load_loop("balanced_lqi", t, quality_load_costs(t, th_lqi), ordering, true);
}

RoutingTable path_baseline(const Topology& t) {
    const std::vector<double> weights = unit_weights(t);
    std::map<NodeId, Path> paths;
    for (NodeId s = 0; s < t.node_count(); ++s) {
        if (s == t.sink) continue;
        auto p = min_cost_path(t, s, t.sink, weights);
        if (!p) throw Unreachable("no path from node " + std::to_string(s) + " to sink");
        paths.emplace(s, std::move(*p));
    }
    return finalize_table("path", std::move(paths));
}

RoutingTable lqi_baseline(const Topology& t, int th_lqi) {
    // Same scaled weights as the quality term of rall/balanced_lqi, so tie
    // structures coincide bit-for-bit across the algorithms.
    const std::vector<double> weights = quality_load_costs(t, th_lqi).base;
    std::map<NodeId, Path> paths;
    for (NodeId s = 0; s < t.node_count(); ++s) {
        if (s == t.sink) continue;
        auto p = min_cost_path(t, s, t.sink, weights);
        if (!p) throw Unreachable("no path from node " + std::to_string(s) + " to sink");
        paths.emplace(s, std::move(*p));
    }
    return finalize_table("lqi", std::move(paths));
}

std::vector<Path> k_shortest_paths(const Topology& t, NodeId src, NodeId sink, int k) {
    const std::vector<double> weights = unit_weights(t);
    std::vector<Path> found;
    auto first = min_cost_path(t, src, sink, weights);
    if (!first) return found;
    found.push_back(*first);

    // Candidate sequences ordered by (hops, lexicographic node sequence).
    auto seq_after = [](const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    };
    std::set<std::vector<NodeId>, decltype(seq_after)> candidates(seq_after);
    std::set<std::vector<NodeId>> taken{first->node_sequence()};

    while (static_cast<int>(found.size()) < k) {
        const std::vector<NodeId> prev = found.back().node_sequence();
        for (size_t i = 0; i + 1 < prev.size(); ++i) {
            const NodeId spur = prev[i];
            const std::vector<NodeId> root(prev.begin(), prev.begin() + i + 1);

            std::vector<char> banned_nodes(t.node_count(), 0);
            for (size_t j = 0; j < i; ++j) banned_nodes[prev[j]] = 1;
            std::vector<char> banned_links(t.link_count(), 0);
            for (const Path& p : found) {
                const std::vector<NodeId> seq = p.node_sequence();
                if (seq.size() > i && std::equal(root.begin(), root.end(), seq.begin()))
                    banned_links[t.link_index(seq[i], seq[i + 1])] = 1;
            }

            auto spur_path = min_cost_path(t, spur, sink, weights, &banned_nodes, &banned_links);
            if (!spur_path) continue;
            std::vector<NodeId> total = root;
            const std::vector<NodeId> tail = spur_path->node_sequence();
            total.insert(total.end(), tail.begin() + 1, tail.end());
            if (!taken.count(total)) candidates.insert(std::move(total));
        }
        if (candidates.empty()) break;
        const std::vector<NodeId> next = *candidates.begin();
        candidates.erase(candidates.begin());
        taken.insert(next);
        found.push_back(path_from_sequence(t, next));
    }
    return found;
}

RoutingTable bpr(const Topology& t, int k, const FlowOrdering& ordering) {
    std::vector<int> load(t.node_count(), 0);
    std::map<NodeId, Path> paths;
    for (NodeId s : order_flows(t, ordering)) {
        const std::vector<Path> cands = k_shortest_paths(t, s, t.sink, std::max(1, k));
        if (cands.empty()) throw Unreachable("no path from node " + std::to_string(s) + " to sink");

        const int current_max = *std::max_element(load.begin(), load.end());
        auto resulting_max = [&](const Path& p) {
            int m = current_max;
            for (const DirectedLink& hop : p.hops) m = std::max(m, load[hop.src] + 1);
            return m;
        };

        // Shortest candidate that does not raise the bottleneck; otherwise the
        // one minimizing the resulting bottleneck (candidates are pre-sorted
        // by hops then node sequence, so "first" is the tie-break).
        const Path* chosen = nullptr;
        for (const Path& p : cands) {
            if (resulting_max(p) <= current_max) {
                chosen = &p;
                break;
            }
        }
        if (!chosen) {
            int best = std::numeric_limits<int>::max();
            for (const Path& p : cands) {
                const int m = resulting_max(p);
                if (m < best) {
                    best = m;
                    chosen = &p;
                }
            }
        }
        for (const DirectedLink& hop : chosen->hops) load[hop.src] += 1;
        paths.emplace(s, *chosen);
    }
    return finalize_table("bpr", std::move(paths));
}

nlohmann::json to_json(const RoutingTable& rt) {
    nlohmann::json paths = nlohmann::json::object();
    for (const auto& [src, path] : rt.paths) {
        nlohmann::json hops = nlohmann::json::array();
        for (const DirectedLink& l : path.hops)
            hops.push_back({{"src", l.src}, {"dst", l.dst}, {"lqi", l.lqi}});
        paths[std::to_string(src)] = std::move(hops);
    }
    nlohmann::json flows = nlohmann::json::array();
    for (const auto& [edge, count] : rt.edge_flows)
        flows.push_back({{"src", edge.first}, {"dst", edge.second}, {"flows", count}});
    nlohmann::json loads = nlohmann::json::object();
    for (const auto& [node, l] : rt.node_loads) loads[std::to_string(node)] = l;
    return {{"algorithm", rt.algorithm},
            {"paths", paths},
            {"edge_flows", flows},
            {"node_loads", loads}};
}

RoutingTable routing_table_from_json(const nlohmann::json& j) {
    RoutingTable rt;
    rt.algorithm = j.at("algorithm").get<std::string>();
    for (const auto& [key, hops] : j.at("paths").items()) {
        Path p;
        p.source = std::stoi(key);
        for (const auto& l : hops)
            p.hops.push_back(
                {l.at("src").get<NodeId>(), l.at("dst").get<NodeId>(), l.at("lqi").get<int>()});
        rt.paths.emplace(p.source, std::move(p));
    }
    for (const auto& f : j.at("edge_flows"))
        rt.edge_flows[{f.at("src").get<NodeId>(), f.at("dst").get<NodeId>()}] =
            f.at("flows").get<int>();
    for (const auto& [key, l] : j.at("node_loads").items())
        rt.node_loads[std::stoi(key)] = l.get<int>();
    return rt;
}

void save_routing_table(const RoutingTable& rt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(rt).dump(2) << "\n";
}

RoutingTable load_routing_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return routing_table_from_json(j);
}

}  // namespace rallnet
