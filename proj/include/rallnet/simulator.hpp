#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rallnet/routing.hpp"
#include "rallnet/topology.hpp"

namespace rallnet {

// Phase-2 traffic and energy parameters. Defaults mirror the mote
// configuration this model targets (100 J battery, 20/10 mJ per packet,
// 127-byte packets at 250 kbps, Poisson generation at 5 packets/minute).
// The event clock runs on integer nanoseconds for exact, portable timing.
struct SimConfig {
    double gen_rate = 5.0;    // packets per minute per source node
    double duration = 600.0;  // seconds of traffic generation
    double initial_energy = 100.0;
    double tx_energy = 0.020;  // joules per transmission attempt
    double rx_energy = 0.010;  // joules per successful reception
    int packet_size = 127;     // bytes
    double link_rate = 250000.0;  // bits per second
    int max_retries = 3;          // transmission attempts per hop (min 1)
    double contention_delay_per_load = 0.050;  // seconds per unit of receiver load
    double control_packets_per_hop = 1.0;      // accounted per transmission attempt
    double loss_alpha = 0.5;                   // attempt success = (lqi/255)^alpha
    std::uint64_t seed = 0;

    std::int64_t tx_time_ns() const {
        return std::llround(packet_size * 8 * 1e9 / link_rate);
    }
    std::int64_t contention_per_load_ns() const {
        return std::llround(contention_delay_per_load * 1e9);
    }
    std::int64_t duration_ns() const { return std::llround(duration * 1e9); }
};

enum class DropReason { LinkLoss, DeadNode, RetryExhausted };

std::string drop_reason_name(DropReason r);

struct PacketRecord {
    NodeId source = 0;
    std::int64_t created_at_ns = 0;
    std::optional<std::int64_t> delivered_at_ns;
    int hops_traversed = 0;
    int retransmissions = 0;  // failed attempts summed over hops
    std::optional<DropReason> dropped_reason;
    std::vector<int> attempts_per_hop;  // indexed by hop position on the route

    std::optional<std::int64_t> latency_ns() const {
        if (!delivered_at_ns) return std::nullopt;
        return *delivered_at_ns - created_at_ns;
    }
    double created_at_s() const { return created_at_ns / 1e9; }
};

struct SimResult {
    std::vector<PacketRecord> packets;
    std::map<NodeId, double> node_energy_trace;  // final joules per node
    std::optional<std::int64_t> lifetime_ns;     // first node death
    double control_packet_count = 0.0;
    long data_tx_count = 0;  // total transmission attempts
    std::map<NodeId, long> node_tx_attempts;
    std::map<NodeId, long> node_rx_count;
    std::map<NodeId, std::int64_t> node_death_time_ns;  // only nodes that died

    long delivered_count() const;
    long dropped_count() const;
    std::optional<double> lifetime_s() const {
        if (!lifetime_ns) return std::nullopt;
        return *lifetime_ns / 1e9;
    }
};

// Per-attempt delivery probability of a link: (lqi/255)^alpha.
double hop_success_probability(int lqi, double alpha);

// Event-driven run of Poisson traffic over fixed routes. Packet generation
// stops at config.duration; in-flight packets then drain so that every packet
// ends either delivered or dropped. Deterministic for a fixed seed. The sink
// spends reception energy in the trace but never dies.
SimResult run_simulation(const Topology& t, const RoutingTable& routes, const SimConfig& config);

// First node-death timestamp, recomputed from the death records.
std::optional<std::int64_t> lifetime(const SimResult& result);

nlohmann::json to_json(const SimResult& r);
void save_sim_result(const SimResult& r, const std::string& path);

// Per-packet CSV: source, created_at, delivered_at, hops, retries, drop_reason
// (timestamps in seconds).
void write_packets_csv(const SimResult& r, std::ostream& out);

}  // namespace rallnet
