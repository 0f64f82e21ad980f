#include "rallnet/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rallnet {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::string csv_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double jain_index(const std::vector<double>& loads) {
    double sum = 0.0, sum_sq = 0.0;
    for (double x : loads) {
        sum += x;
        sum_sq += x * x;
    }
    if (sum_sq == 0.0) throw std::domain_error("jain index undefined for all-zero loads");
    return (sum * sum) / (loads.size() * sum_sq);
}

std::vector<double> routing_loads(const RoutingTable& rt) {
    std::vector<double> loads;
    loads.reserve(rt.paths.size());
    for (const auto& [node, path] : rt.paths) loads.push_back(rt.load_of(node));
    return loads;
}

double loss_rate(const SimResult& result) {
    const long total = static_cast<long>(result.packets.size());
    if (total == 0) throw NoTraffic("no packets generated");
    return static_cast<double>(result.dropped_count()) / total;
}

LatencyHistogram latency_histogram(const SimResult& result, double bucket_ms) {
    LatencyHistogram h;
    h.bucket_width_s = bucket_ms / 1000.0;
    const std::int64_t bucket_ns = std::llround(bucket_ms * 1e6);
    for (const PacketRecord& p : result.packets) {
        const auto latency = p.latency_ns();
        if (!latency) continue;
        // Half-open buckets: an exact boundary value lands in the next one.
        const size_t bucket = static_cast<size_t>(*latency / bucket_ns);
        if (h.counts.size() <= bucket) h.counts.resize(bucket + 1, 0);
        h.counts[bucket] += 1;
    }
    return h;
}

double avg_path_length(const RoutingTable& rt) {
    if (rt.paths.empty()) return kNan;
    long total = 0;
    for (const auto& [node, path] : rt.paths) total += path.length();
    return static_cast<double>(total) / rt.paths.size();
}

double control_overhead(const SimResult& result) {
    if (result.packets.empty()) throw NoTraffic("no packets generated");
    const long delivered = result.delivered_count();
    if (delivered == 0) throw NoTraffic("nothing delivered");
    return result.control_packet_count / delivered;
}

double mean_latency(const SimResult& result) {
    double sum_ns = 0.0;
    long n = 0;
    for (const PacketRecord& p : result.packets) {
        const auto latency = p.latency_ns();
        if (!latency) continue;
        sum_ns += static_cast<double>(*latency);
        ++n;
    }
    if (n == 0) throw NoTraffic("nothing delivered");
    return sum_ns / 1e9 / n;
}

MetricsReport compute_metrics(const RoutingTable& rt, const SimResult& result) {
    MetricsReport m;
    m.generated = static_cast<long>(result.packets.size());
    m.delivered = result.delivered_count();
    m.dropped = result.dropped_count();
    m.loss_rate = m.generated > 0 ? loss_rate(result) : kNan;
    m.jain = jain_index(routing_loads(rt));
    m.latency_hist = latency_histogram(result);
    m.mean_latency = m.delivered > 0 ? mean_latency(result) : kNan;
    m.avg_path_length = avg_path_length(rt);
    m.lifetime = result.lifetime_s();
    m.control_overhead = m.delivered > 0 ? control_overhead(result) : kNan;
    m.max_node_load = rt.max_node_load();
    return m;
}

std::string metrics_csv_header() {
    return "topology_id,seed,algorithm,n_nodes,loss_rate,jain,mean_latency,avg_path_len,"
           "lifetime_s,control_overhead,max_node_load,generated,delivered";
}

std::string metrics_csv_row(const std::string& topology_id, std::uint64_t seed,
                            const std::string& algorithm, int n_nodes, const MetricsReport& m) {
    std::ostringstream out;
    out << topology_id << ',' << seed << ',' << algorithm << ',' << n_nodes << ','
        << csv_double(m.loss_rate) << ',' << csv_double(m.jain) << ','
        << csv_double(m.mean_latency) << ',' << csv_double(m.avg_path_length) << ','
        << csv_double(m.lifetime ? *m.lifetime : kNan) << ',' << csv_double(m.control_overhead)
        << ',' << m.max_node_load << ',' << m.generated << ',' << m.delivered;
    return out.str();
}

nlohmann::json to_json(const MetricsReport& m) {
    auto num_or_null = [](double v) {
        return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    };
    return {{"generated", m.generated},
            {"delivered", m.delivered},
            {"dropped", m.dropped},
            {"loss_rate", num_or_null(m.loss_rate)},
            {"jain_index", num_or_null(m.jain)},
            {"latency_bucket_s", m.latency_hist.bucket_width_s},
            {"latency_histogram", m.latency_hist.counts},
            {"mean_latency_s", num_or_null(m.mean_latency)},
            {"avg_path_length", num_or_null(m.avg_path_length)},
            {"lifetime_s", m.lifetime ? nlohmann::json(*m.lifetime) : nlohmann::json()},
            {"control_overhead", num_or_null(m.control_overhead)},
            {"max_node_load", m.max_node_load}};
}

}  // namespace rallnet
