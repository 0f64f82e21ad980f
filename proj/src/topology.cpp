#include "rallnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include "rallnet/rng.hpp"

namespace rallnet {

void Topology::rebuild_index() {
    std::sort(links.begin(), links.end(), [](const DirectedLink& a, const DirectedLink& b) {
        return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
    });
    out_adj_.assign(positions.size(), {});
    for (int i = 0; i < link_count(); ++i) out_adj_[links[i].src].push_back(i);
}

int Topology::link_index(NodeId src, NodeId dst) const {
    for (int i : out_adj_[src])
        if (links[i].dst == dst) return i;
    return -1;
}

int Topology::lqi_at(NodeId src, NodeId dst) const {
    const int i = link_index(src, dst);
    return i < 0 ? -1 : links[i].lqi;
}

int lqi_model(double distance, double range, const LqiModelParams& params, double noise_draw) {
    const double frac = 1.0 - distance / range;
    const double raw = 255.0 * std::pow(frac, params.gamma) + noise_draw;
    const double rounded = std::round(raw);
    return static_cast<int>(std::clamp(rounded, 0.0, 255.0));
}

bool is_connected(const Topology& t) {
    // BFS from the sink over reversed links.
    const int n = t.node_count();
    std::vector<std::vector<NodeId>> rev(n);
    for (const DirectedLink& l : t.links) rev[l.dst].push_back(l.src);

    std::vector<char> seen(n, 0);
    std::deque<NodeId> queue{t.sink};
    seen[t.sink] = 1;
    int reached = 1;
    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        for (NodeId u : rev[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++reached;
                queue.push_back(u);
            }
        }
    }
    return reached == n;
}

namespace {

double euclidean(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

Topology generate_topology(int n, double area_side, double range, const LqiModelParams& params,
                           std::uint64_t seed) {
    if (n < 2) throw GenerationFailed("need at least 2 nodes");
    if (area_side <= 0.0 || range <= 0.0) throw GenerationFailed("area_side and range must be positive");

    Rng rng(splitmix64(seed));
    const double center = area_side / 2.0;
    const double place_sigma = area_side / 4.0;
    constexpr int kMaxAttempts = 1000;

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Topology t;
        t.area_side = area_side;
        t.range = range;
        t.sink = 0;
        t.positions.resize(n);
        t.positions[0] = {center, center};  // sink pinned at the center
        for (int v = 1; v < n; ++v) {
            double x, y;
            do {
                x = rng.normal(center, place_sigma);
                y = rng.normal(center, place_sigma);
            } while (x < 0.0 || x > area_side || y < 0.0 || y > area_side);
            t.positions[v] = {x, y};
        }

        for (NodeId s = 0; s < n; ++s) {
            for (NodeId d = 0; d < n; ++d) {
                if (s == d) continue;
                const double dist = euclidean(t.positions[s], t.positions[d]);
                if (dist > range) continue;
                const double noise = params.sigma > 0.0 ? rng.normal(0.0, params.sigma) : 0.0;
                t.links.push_back({s, d, lqi_model(dist, range, params, noise)});
            }
        }
        t.rebuild_index();

        if (is_connected(t)) return t;
    }
    throw GenerationFailed("no sink-connected placement in " + std::to_string(kMaxAttempts) +
                           " attempts (n=" + std::to_string(n) + ", range=" + std::to_string(range) + ")");
}

nlohmann::json to_json(const Topology& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (int v = 0; v < t.node_count(); ++v)
        nodes.push_back({{"id", v}, {"x", t.positions[v].x}, {"y", t.positions[v].y}});
    nlohmann::json links = nlohmann::json::array();
    for (const DirectedLink& l : t.links)
        links.push_back({{"src", l.src}, {"dst", l.dst}, {"lqi", l.lqi}});
    return {{"area_side", t.area_side},
            {"range", t.range},
            {"sink", t.sink},
            {"nodes", nodes},
            {"links", links}};
}

Topology topology_from_json(const nlohmann::json& j) {
    Topology t;
    t.area_side = j.at("area_side").get<double>();
    t.range = j.at("range").get<double>();
    t.sink = j.at("sink").get<NodeId>();
    t.positions.resize(j.at("nodes").size());
    for (const auto& n : j.at("nodes")) {
        const int id = n.at("id").get<int>();
        t.positions.at(id) = {n.at("x").get<double>(), n.at("y").get<double>()};
    }
    for (const auto& l : j.at("links"))
        t.links.push_back({l.at("src").get<NodeId>(), l.at("dst").get<NodeId>(), l.at("lqi").get<int>()});
    t.rebuild_index();
    return t;
}

void save_topology(const Topology& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(t).dump(2) << "\n";
}

Topology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return topology_from_json(j);
}

}  // namespace rallnet
