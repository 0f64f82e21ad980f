#include "rallnet/simulator.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <ostream>
#include <queue>

#include "rallnet/rng.hpp"

namespace rallnet {

namespace {
constexpr std::uint64_t kGenStreamTag = 0x67656e5fULL;   // generation times
constexpr std::uint64_t kLossStreamTag = 0x6c6f7373ULL;  // attempt outcomes
}  // namespace

std::string drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::LinkLoss: return "LinkLoss";
        case DropReason::DeadNode: return "DeadNode";
        case DropReason::RetryExhausted: return "RetryExhausted";
    }
    return "?";
}

long SimResult::delivered_count() const {
    long n = 0;
    for (const PacketRecord& p : packets) n += p.delivered_at_ns.has_value();
    return n;
}

long SimResult::dropped_count() const {
    long n = 0;
    for (const PacketRecord& p : packets) n += p.dropped_reason.has_value();
    return n;
}

double hop_success_probability(int lqi, double alpha) {
    return std::pow(lqi / 255.0, alpha);
}

std::optional<std::int64_t> lifetime(const SimResult& result) {
    std::optional<std::int64_t> first;
    for (const auto& [node, t] : result.node_death_time_ns)
        if (!first || t < *first) first = t;
    return first;
}

namespace {

struct Event {
    std::int64_t time_ns = 0;
    std::uint64_t seq = 0;  // insertion order breaks timestamp ties
    enum Kind { Creation, AttemptDone } kind = Creation;
    int packet = -1;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time_ns != b.time_ns) return a.time_ns > b.time_ns;
        return a.seq > b.seq;
    }
};

struct PacketState {
    int hop_index = 0;
    int attempts_this_hop = 0;
};

class Simulation {
  public:
    Simulation(const Topology& t, const RoutingTable& routes, const SimConfig& cfg)
        : topo_(t), cfg_(cfg), loss_rng_(mix_seed(cfg.seed, {kLossStreamTag})) {
        const int n = t.node_count();
        routes_.resize(n);
        for (NodeId v = 0; v < n; ++v) {
            if (v == t.sink) continue;
            auto it = routes.paths.find(v);
            if (it == routes.paths.end() || it->second.hops.empty())
                throw RoutesIncomplete("no route for node " + std::to_string(v));
            routes_[v] = &it->second.hops;
        }
        recv_load_.assign(n, 0);
        for (NodeId v = 0; v < n; ++v) recv_load_[v] = routes.load_of(v);
        tx_attempts_.assign(n, 0);
        rx_count_.assign(n, 0);
        alive_.assign(n, 1);
        busy_.assign(n, 0);
        queues_.resize(n);
        attempts_allowed_ = std::max(1, cfg.max_retries);
        tx_ns_ = cfg.tx_time_ns();
        contention_ns_ = cfg.contention_per_load_ns();
    }

    SimResult run() {
        generate_packets();
        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            switch (ev.kind) {
                case Event::Creation: on_creation(ev); break;
                case Event::AttemptDone: on_attempt_done(ev); break;
            }
        }
        return collect();
    }

  private:
    double remaining_energy(NodeId v) const {
        return cfg_.initial_energy - cfg_.tx_energy * tx_attempts_[v] -
               cfg_.rx_energy * rx_count_[v];
    }

    void push_event(std::int64_t time_ns, Event::Kind kind, int packet) {
        events_.push({time_ns, next_seq_++, kind, packet});
    }

    void generate_packets() {
        if (cfg_.gen_rate <= 0.0) return;
        const double rate = cfg_.gen_rate / 60.0;  // per second
        const std::int64_t horizon = cfg_.duration_ns();
        for (NodeId v = 0; v < topo_.node_count(); ++v) {
            if (v == topo_.sink) continue;
            Rng rng(mix_seed(cfg_.seed, {kGenStreamTag, static_cast<std::uint64_t>(v)}));
            double t_s = rng.exponential(rate);
            for (;;) {
                const std::int64_t t_ns = std::llround(t_s * 1e9);
                if (t_ns >= horizon) break;
                PacketRecord rec;
                rec.source = v;
                rec.created_at_ns = t_ns;
                rec.attempts_per_hop.assign(routes_[v]->size(), 0);
                const int id = static_cast<int>(records_.size());
                records_.push_back(std::move(rec));
                state_.push_back({});
                push_event(t_ns, Event::Creation, id);
                t_s += rng.exponential(rate);
            }
        }
    }

    const DirectedLink& current_link(int packet) const {
        return (*routes_[records_[packet].source])[state_[packet].hop_index];
    }

    void on_creation(const Event& ev) {
        const NodeId src = records_[ev.packet].source;
        if (!alive_[src]) {
            drop(ev.packet, DropReason::DeadNode);
            return;
        }
        enqueue(src, ev.packet, ev.time_ns);
    }

    void enqueue(NodeId u, int packet, std::int64_t now) {
        queues_[u].push_back(packet);
        if (!busy_[u]) serve_next(u, now);
    }

    void serve_next(NodeId u, std::int64_t now) {
        if (queues_[u].empty() || !alive_[u]) {
            busy_[u] = 0;
            return;
        }
        busy_[u] = 1;
        const int packet = queues_[u].front();
        queues_[u].pop_front();
        start_attempt(u, packet, now);
    }

    void start_attempt(NodeId u, int packet, std::int64_t now) {
        state_[packet].attempts_this_hop += 1;
        records_[packet].attempts_per_hop[state_[packet].hop_index] += 1;
        tx_attempts_[u] += 1;
        total_attempts_ += 1;
        if (u != topo_.sink && alive_[u] && remaining_energy(u) <= 0.0) die(u, now);
        const DirectedLink& link = current_link(packet);
        const std::int64_t service = tx_ns_ + contention_ns_ * recv_load_[link.dst];
        push_event(now + service, Event::AttemptDone, packet);
    }

    void die(NodeId u, std::int64_t now) {
        alive_[u] = 0;
        death_time_[u] = now;
        // Queued packets are lost; an in-flight attempt still completes.
        for (int packet : queues_[u]) drop(packet, DropReason::DeadNode);
        queues_[u].clear();
    }

    void on_attempt_done(const Event& ev) {
        const int packet = ev.packet;
        const DirectedLink& link = current_link(packet);
        const NodeId u = link.src;
        const bool success =
            loss_rng_.bernoulli(hop_success_probability(link.lqi, cfg_.loss_alpha));

        if (success) {
            forward(packet, link.dst, ev.time_ns);
        } else {
            records_[packet].retransmissions += 1;
            if (!alive_[u]) {
                drop(packet, DropReason::DeadNode);
            } else if (state_[packet].attempts_this_hop < attempts_allowed_) {
                start_attempt(u, packet, ev.time_ns);
                return;  // u keeps serving this packet
            } else {
                drop(packet, attempts_allowed_ > 1 ? DropReason::RetryExhausted
                                                   : DropReason::LinkLoss);
            }
        }
        if (alive_[u]) serve_next(u, ev.time_ns);
        else busy_[u] = 0;
    }

    void forward(int packet, NodeId v, std::int64_t now) {
        if (!alive_[v]) {
            drop(packet, DropReason::DeadNode);
            return;
        }
        rx_count_[v] += 1;  // the sink spends reception energy too
        records_[packet].hops_traversed += 1;
        if (v == topo_.sink) {
            records_[packet].delivered_at_ns = now;
            return;
        }
        if (remaining_energy(v) <= 0.0) {
            die(v, now);
            drop(packet, DropReason::DeadNode);
            return;
        }
        state_[packet].hop_index += 1;
        state_[packet].attempts_this_hop = 0;
        enqueue(v, packet, now);
    }

    void drop(int packet, DropReason reason) { records_[packet].dropped_reason = reason; }

    SimResult collect() {
        SimResult r;
        r.packets = std::move(records_);
        for (NodeId v = 0; v < topo_.node_count(); ++v) {
            r.node_energy_trace[v] = remaining_energy(v);
            r.node_tx_attempts[v] = tx_attempts_[v];
            r.node_rx_count[v] = rx_count_[v];
        }
        r.node_death_time_ns = death_time_;
        r.data_tx_count = total_attempts_;
        r.control_packet_count = cfg_.control_packets_per_hop * total_attempts_;
        r.lifetime_ns = lifetime(r);
        return r;
    }

    const Topology& topo_;
    const SimConfig& cfg_;
    Rng loss_rng_;
    int attempts_allowed_ = 1;
    std::int64_t tx_ns_ = 0;
    std::int64_t contention_ns_ = 0;

    std::vector<const std::vector<DirectedLink>*> routes_;
    std::vector<int> recv_load_;
    std::vector<long> tx_attempts_;
    std::vector<long> rx_count_;
    std::vector<char> alive_;
    std::vector<char> busy_;
    std::vector<std::deque<int>> queues_;
    std::map<NodeId, std::int64_t> death_time_;

    std::vector<PacketRecord> records_;
    std::vector<PacketState> state_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::uint64_t next_seq_ = 0;
    long total_attempts_ = 0;
};

}  // namespace

SimResult run_simulation(const Topology& t, const RoutingTable& routes, const SimConfig& config) {
    return Simulation(t, routes, config).run();
}

nlohmann::json to_json(const SimResult& r) {
    nlohmann::json packets = nlohmann::json::array();
    for (const PacketRecord& p : r.packets) {
        nlohmann::json j{{"source", p.source},
                         {"created_at", p.created_at_s()},
                         {"hops_traversed", p.hops_traversed},
                         {"retransmissions", p.retransmissions},
                         {"attempts_per_hop", p.attempts_per_hop}};
        j["delivered_at"] =
            p.delivered_at_ns ? nlohmann::json(*p.delivered_at_ns / 1e9) : nlohmann::json();
        j["dropped_reason"] =
            p.dropped_reason ? nlohmann::json(drop_reason_name(*p.dropped_reason)) : nlohmann::json();
        packets.push_back(std::move(j));
    }
    nlohmann::json energy = nlohmann::json::object();
    for (const auto& [node, joules] : r.node_energy_trace) energy[std::to_string(node)] = joules;
    nlohmann::json deaths = nlohmann::json::object();
    for (const auto& [node, t] : r.node_death_time_ns) deaths[std::to_string(node)] = t / 1e9;
    const auto life = r.lifetime_s();
    return {{"packets", packets},
            {"node_energy_trace", energy},
            {"node_death_time", deaths},
            {"lifetime", life ? nlohmann::json(*life) : nlohmann::json()},
            {"control_packet_count", r.control_packet_count},
            {"data_tx_count", r.data_tx_count}};
}

void save_sim_result(const SimResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(r).dump() << "\n";
}

void write_packets_csv(const SimResult& r, std::ostream& out) {
    out << "source,created_at,delivered_at,hops,retries,drop_reason\n";
    char buf[160];
    for (const PacketRecord& p : r.packets) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,", p.source, p.created_at_s());
        out << buf;
        if (p.delivered_at_ns) {
            std::snprintf(buf, sizeof buf, "%.9g", *p.delivered_at_ns / 1e9);
            out << buf;
        }
        out << "," << p.hops_traversed << "," << p.retransmissions << ",";
        if (p.dropped_reason) out << drop_reason_name(*p.dropped_reason);
        out << "\n";
    }
}

}  // namespace rallnet
