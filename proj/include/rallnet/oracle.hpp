#pragma once

#include <map>
#include <optional>

#include "rallnet/routing.hpp"
#include "rallnet/topology.hpp"

namespace rallnet {

// Exact solution of one single-objective flow-assignment problem on a small
// instance. The assignment, when present, is one witness satisfying the
// flow-conservation constraints (one flow per non-sink node, all to the sink).
struct OracleResult {
    double objective_value = 0.0;
    std::optional<std::map<NodeId, Path>> assignment;
};

// Minimal total hop count over all flows. Separable per flow, solved by BFS.
OracleResult min_total_hops(const Topology& t);

// Minimal total quality penalty (sum of normalized low-quality terms over all
// flow paths). Separable per flow; computed in exact integer units of 1/th.
OracleResult min_lqi_cost(const Topology& t, int th_lqi);
long min_lqi_units(const Topology& t, int th_lqi);

// Minimal achievable bottleneck (max flows transiting one non-sink node),
// by branch-and-bound over per-flow simple-path choices.
OracleResult min_bottleneck_exact(const Topology& t, int max_nodes = 10);

// Objective evaluations of a heuristic routing table, in the oracle's exact
// arithmetic, for optimality-floor comparisons.
long eval_total_hops(const RoutingTable& rt);
long eval_lqi_units(const RoutingTable& rt, int th_lqi);
int eval_bottleneck(const RoutingTable& rt);

// All simple paths src -> sink, ordered by (hops, node sequence).
std::vector<Path> enumerate_simple_paths(const Topology& t, NodeId src, NodeId sink);

// True iff the assignment satisfies the flow constraints: one simple
// sink-terminated path per non-sink node over existing links.
bool assignment_feasible(const Topology& t, const std::map<NodeId, Path>& assignment);

}  // namespace rallnet
