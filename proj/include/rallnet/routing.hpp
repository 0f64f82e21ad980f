#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rallnet/costs.hpp"
#include "rallnet/topology.hpp"

namespace rallnet {

// Simple sink-bound path: links chain head-to-tail from `source` to the sink.
struct Path {
    NodeId source = 0;
    std::vector<DirectedLink> hops;

    int length() const { return static_cast<int>(hops.size()); }
    // Node sequence [source, ..., sink].
    std::vector<NodeId> node_sequence() const;

    friend bool operator==(const Path&, const Path&) = default;
};

using EdgeKey = std::pair<NodeId, NodeId>;

// One sink path per non-sink node plus the flow tallies derived from them.
struct RoutingTable {
    std::string algorithm;
    std::map<NodeId, Path> paths;
    std::map<EdgeKey, int> edge_flows;  // a_sd: paths using each link
    std::map<NodeId, int> node_loads;   // paths transiting each non-sink node

    int load_of(NodeId v) const {
        auto it = node_loads.find(v);
        return it == node_loads.end() ? 0 : it->second;
    }
    int max_node_load() const;
};

enum class OrderingStrategy { NearestFirst, FarthestFirst, NodeIdAscending, RandomSeeded };

struct FlowOrdering {
    OrderingStrategy strategy = OrderingStrategy::NearestFirst;
    std::uint64_t seed = 0;  // only for RandomSeeded
};

// Minimal-working-cost simple path src -> sink. Ties broken by fewer hops,
// then lexicographically smallest node-id sequence.
Path mc_path(NodeId src, NodeId sink, const EdgeCosts& costs, const Topology& t);

// Permutation of non-sink nodes; Nearest/FarthestFirst sort by BFS hop
// distance to the sink, ties by ascending id.
std::vector<NodeId> order_flows(const Topology& t, const FlowOrdering& ordering);

// The main algorithm: weighted-sum base costs, then one greedy Dijkstra per
// flow with load feedback on the working costs. `load_feedback=false` keeps
// costs static (used by the reduction identities).
RoutingTable rall(const Topology& t, const CostParams& params, const FlowOrdering& ordering,
                  bool load_feedback = true);

// Hop-count shortest paths (unit costs), same tie-breaking as mc_path.
RoutingTable path_baseline(const Topology& t);

// Minimal total quality penalty per flow, no load feedback.
RoutingTable lqi_baseline(const Topology& t, int th_lqi);

// Quality + load only (no hop term, no weights), same greedy loop as rall.
RoutingTable balanced_lqi(const Topology& t, int th_lqi, const FlowOrdering& ordering);

// Bottleneck-avoiding pick among the k hop-shortest loopless candidates.
RoutingTable bpr(const Topology& t, int k, const FlowOrdering& ordering);

// Yen's k shortest loopless paths by (hop count, node sequence), ascending.
std::vector<Path> k_shortest_paths(const Topology& t, NodeId src, NodeId sink, int k);

// BFS hop distance to the sink for every node (-1 if unreachable).
std::vector<int> hop_distances_to_sink(const Topology& t);

nlohmann::json to_json(const RoutingTable& rt);
RoutingTable routing_table_from_json(const nlohmann::json& j);
void save_routing_table(const RoutingTable& rt, const std::string& path);
RoutingTable load_routing_table(const std::string& path);

}  // namespace rallnet
