#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rallnet/routing.hpp"
#include "rallnet/simulator.hpp"

namespace rallnet {

struct LatencyHistogram {
    double bucket_width_s = 0.6;
    std::vector<long> counts;  // [0,w), [w,2w), ... over delivered packets
};

// Everything the evaluation reads off one (routing table, simulation) pair.
// Ratio fields are NaN when their denominator is zero (no traffic / nothing
// delivered), which serializes as "nan" in CSV and null in JSON.
struct MetricsReport {
    long generated = 0;
    long delivered = 0;
    long dropped = 0;
    double loss_rate = 0.0;
    double jain = 0.0;  // over routing-time node loads, sink excluded
    LatencyHistogram latency_hist;
    double mean_latency = 0.0;  // seconds, delivered packets
    double avg_path_length = 0.0;
    std::optional<double> lifetime;
    double control_overhead = 0.0;  // control packets per delivered packet
    int max_node_load = 0;
};

// (sum x)^2 / (n * sum x^2). Loads must not be all zero.
double jain_index(const std::vector<double>& loads);

// Forwarding loads of every non-sink node (zeros included), jain input.
std::vector<double> routing_loads(const RoutingTable& rt);

double loss_rate(const SimResult& result);
LatencyHistogram latency_histogram(const SimResult& result, double bucket_ms = 600.0);
double avg_path_length(const RoutingTable& rt);
double control_overhead(const SimResult& result);
double mean_latency(const SimResult& result);

MetricsReport compute_metrics(const RoutingTable& rt, const SimResult& result);

// Shortest round-trippable form; NaN prints as "nan".
std::string csv_double(double v);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& topology_id, std::uint64_t seed,
                            const std::string& algorithm, int n_nodes, const MetricsReport& m);

nlohmann::json to_json(const MetricsReport& m);

}  // namespace rallnet
