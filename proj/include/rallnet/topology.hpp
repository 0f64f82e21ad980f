#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rallnet/errors.hpp"

#include "json.hpp"

namespace rallnet {

using NodeId = int;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

// Directed radio link with its own LQI per direction (links are asymmetric).
struct DirectedLink {
    NodeId src = 0;
    NodeId dst = 0;
    int lqi = 0;  // [0, 255]

    friend bool operator==(const DirectedLink&, const DirectedLink&) = default;
};

// Parametric distance-based LQI model standing in for a real radio:
// lqi = clamp(round(255 * (1 - d/range)^gamma + N(0, sigma)), 0, 255).
struct LqiModelParams {
    double gamma = 1.5;
    double sigma = 12.0;
};

// Random WSN snapshot: node 0 is the sink, placed at the area center. Every
// generated topology is guaranteed sink-connected over directed links.
struct Topology {
    double area_side = 0.0;
    double range = 0.0;
    NodeId sink = 0;
    std::vector<Position> positions;  // index == node id
    std::vector<DirectedLink> links;  // kept sorted by (src, dst)

    int node_count() const { return static_cast<int>(positions.size()); }
    int link_count() const { return static_cast<int>(links.size()); }

    // Index of link src->dst in `links`, or -1.
    int link_index(NodeId src, NodeId dst) const;
    // LQI of link src->dst, or -1 when absent.
    int lqi_at(NodeId src, NodeId dst) const;
    // Indices into `links` of all out-edges of `src`, ordered by dst.
    const std::vector<int>& out_links(NodeId src) const { return out_adj_[src]; }

    // Rebuild adjacency indexes after links/positions change. Sorts `links`.
    void rebuild_index();

  private:
    std::vector<std::vector<int>> out_adj_;
};

int lqi_model(double distance, double range, const LqiModelParams& params, double noise_draw);

// True iff every non-sink node reaches the sink along directed links.
bool is_connected(const Topology& t);

// Normal placement around the area center (sigma = area_side/4), rejected
// into [0, area_side]^2; resamples whole placements until sink-connected.
Topology generate_topology(int n, double area_side, double range, const LqiModelParams& params,
                           std::uint64_t seed);

nlohmann::json to_json(const Topology& t);
Topology topology_from_json(const nlohmann::json& j);

void save_topology(const Topology& t, const std::string& path);
Topology load_topology(const std::string& path);

}  // namespace rallnet
