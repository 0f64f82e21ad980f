// Acceptance suite: end-to-end checks of the solver floors, algebraic
// identities, simulator micro-oracles, evaluation trends, and pipeline
// determinism. Run with no arguments for all criteria or with a list of
// criterion numbers. Prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "rallnet/experiment.hpp"
#include "rallnet/metrics.hpp"
#include "rallnet/oracle.hpp"
#include "rallnet/rng.hpp"
#include "rallnet/simulator.hpp"

using namespace rallnet;
namespace fs = std::filesystem;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

template <typename T>
std::string str(const T& v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / xs.size();
}

constexpr std::uint64_t kGridSeed = 20160915;  // master seed of the acceptance grid

std::vector<Topology> grid_topologies(int node_count, int count) {
    const double range = ExperimentConfig{}.range;
    std::vector<Topology> out;
    for (int i = 0; i < count; ++i)
        out.push_back(generate_topology(node_count, 50.0, range, {},
                                        topology_seed(kGridSeed, node_count, i)));
    return out;
}

const CostParams kDefaultCosts{0.5, 0.5, 200, 0};

// ---- criterion 1: oracle optimality floor --------------------------------

void criterion_oracle_floor() {
    const auto start = std::chrono::steady_clock::now();
    int instances = 0;
    for (std::uint64_t seed = 0; instances < 50; ++seed) {
        const int n = 5 + static_cast<int>(seed % 4);  // 5..8 nodes
        Topology t;
        try {
            t = generate_topology(n, 50.0, 24.0, {}, mix_seed(kGridSeed, {1, seed}));
        } catch (const GenerationFailed&) {
            continue;
        }
        ++instances;
        const long hops_opt = static_cast<long>(min_total_hops(t).objective_value);
        const long units_opt = min_lqi_units(t, kDefaultCosts.th_lqi);
        const int bottleneck_opt = static_cast<int>(min_bottleneck_exact(t).objective_value);

        const std::map<std::string, RoutingTable> tables{
            {"rall", rall(t, kDefaultCosts, {})},
            {"balanced_lqi", balanced_lqi(t, kDefaultCosts.th_lqi, {})},
            {"bpr", bpr(t, 5, {})},
            {"path", path_baseline(t)},
            {"lqi", lqi_baseline(t, kDefaultCosts.th_lqi)},
        };
        for (const auto& [name, rt] : tables) {
            require(hops_opt <= eval_total_hops(rt),
                    "hop oracle above " + name + " on seed " + str(seed));
            require(units_opt <= eval_lqi_units(rt, kDefaultCosts.th_lqi),
                    "lqi oracle above " + name + " on seed " + str(seed));
            require(bottleneck_opt <= eval_bottleneck(rt),
                    "bottleneck oracle above " + name + " on seed " + str(seed));
        }
        require(hops_opt == eval_total_hops(tables.at("path")),
                "path baseline misses the hop optimum on seed " + str(seed));
        require(units_opt == eval_lqi_units(tables.at("lqi"), kDefaultCosts.th_lqi),
                "lqi baseline misses the quality optimum on seed " + str(seed));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(elapsed < 30.0, "oracle floor took " + str(elapsed) + " s (budget 30 s)");
}

// ---- criterion 2: reduction identities ------------------------------------

void criterion_reduction_identities() {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 50; ++i) {
        const Topology t =
            generate_topology(20, 50.0, 15.0, {}, mix_seed(kGridSeed, {2, (std::uint64_t)i}));
        const RoutingTable hop_only =
            rall(t, {1.0, 0.0, kDefaultCosts.th_lqi, 0}, {OrderingStrategy::NearestFirst}, false);
        require(hop_only.paths == path_baseline(t).paths,
                "rall(w_p=1, no feedback) != path baseline on topology " + str(i));
        const RoutingTable quality_only =
            rall(t, {0.0, 1.0, kDefaultCosts.th_lqi, 0}, {OrderingStrategy::NearestFirst}, false);
        require(quality_only.paths == lqi_baseline(t, kDefaultCosts.th_lqi).paths,
                "rall(w_l=1, no feedback) != lqi baseline on topology " + str(i));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(elapsed < 5.0, "reduction identities took " + str(elapsed) + " s (budget 5 s)");
}

// ---- criterion 3: load-tally consistency -----------------------------------

void criterion_load_tallies() {
    int runs = 0;
    for (std::uint64_t seed = 0; runs < 100; ++seed) {
        const int n = 8 + static_cast<int>(seed % 13);
        const Topology t =
            generate_topology(n, 50.0, 18.0, {}, mix_seed(kGridSeed, {3, seed}));
        const int which = static_cast<int>(seed % 5);
        const RoutingTable rt =
            which == 0   ? rall(t, kDefaultCosts, {})
            : which == 1 ? balanced_lqi(t, kDefaultCosts.th_lqi, {})
            : which == 2 ? bpr(t, 5, {})
            : which == 3 ? path_baseline(t)
                         : lqi_baseline(t, kDefaultCosts.th_lqi);
        ++runs;

        std::map<EdgeKey, int> edges;
        std::map<NodeId, int> loads;
        for (const auto& [src, path] : rt.paths) {
            for (const DirectedLink& hop : path.hops) {
                edges[{hop.src, hop.dst}] += 1;
                loads[hop.src] += 1;
            }
        }
        require(edges == rt.edge_flows, "edge_flows recount mismatch on seed " + str(seed));
        require(loads == rt.node_loads, "node_loads recount mismatch on seed " + str(seed));

        // Replaying the paths through update_edges must leave working-base
        // deltas equal to the recounted per-node loads.
        EdgeCosts costs = sum_weights(t, kDefaultCosts);
        for (const auto& [src, path] : rt.paths) update_edges(path.hops, costs);
        for (NodeId j = 0; j < t.node_count(); ++j) {
            const int expect = loads.count(j) ? loads.at(j) : 0;
            require(costs.node_load[j] == expect, "replayed load mismatch at node " + str(j));
            // Same-expression equality: working is materialized as base+load,
            // so comparing base+recount hits the identical rounding.
            for (int e : t.out_links(j))
                require(costs.working[e] == costs.base[e] + expect,
                        "working-cost delta mismatch at node " + str(j));
        }
    }
}

// ---- criteria 4-6: routing trends ------------------------------------------

struct RoutingGrid {
    std::map<std::string, std::vector<double>> jain, pathlen, maxload;
};

RoutingGrid routing_grid(int node_count) {
    RoutingGrid g;
    for (const Topology& t : grid_topologies(node_count, 10)) {
        const std::map<std::string, RoutingTable> tables{
            {"rall", rall(t, kDefaultCosts, {})},
            {"balanced_lqi", balanced_lqi(t, kDefaultCosts.th_lqi, {})},
            {"path", path_baseline(t)},
        };
        for (const auto& [name, rt] : tables) {
            // Four simulation seeds share one routing result; the routing
            // metrics repeat per the 40-run grid definition.
            for (int s = 0; s < 4; ++s) {
                g.jain[name].push_back(jain_index(routing_loads(rt)));
                g.pathlen[name].push_back(avg_path_length(rt));
                g.maxload[name].push_back(rt.max_node_load());
            }
        }
    }
    return g;
}

void criterion_jain_trend() {
    const auto start = std::chrono::steady_clock::now();
    const RoutingGrid g = routing_grid(50);
    const double rall_mean = mean_of(g.jain.at("rall"));
    const double balanced_mean = mean_of(g.jain.at("balanced_lqi"));
    const double path_mean = mean_of(g.jain.at("path"));
    require(rall_mean > path_mean + 0.02, "jain margin rall-path: " + str(rall_mean - path_mean));
    require(balanced_mean > path_mean + 0.02,
            "jain margin balanced-path: " + str(balanced_mean - path_mean));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(elapsed < 120.0, "jain trend took " + str(elapsed) + " s (budget 120 s)");
}

void criterion_bottleneck_trend() {
    const RoutingGrid g = routing_grid(50);
    require(mean_of(g.maxload.at("rall")) <= mean_of(g.maxload.at("path")),
            "rall mean bottleneck " + str(mean_of(g.maxload.at("rall"))) + " above path " +
                str(mean_of(g.maxload.at("path"))));
}

void criterion_pathlen_trend() {
    for (int nc : {40, 50}) {
        const RoutingGrid g = routing_grid(nc);
        require(mean_of(g.pathlen.at("rall")) < mean_of(g.pathlen.at("balanced_lqi")),
                "rall mean path length not below balanced_lqi at " + str(nc) + " nodes");
    }
    // Exact minimality of the hop baseline on every topology of the grid.
    for (int nc : {10, 20, 30, 40, 50}) {
        for (const Topology& t : grid_topologies(nc, 10)) {
            const long base = eval_total_hops(path_baseline(t));
            for (const RoutingTable& rt :
                 {rall(t, kDefaultCosts, {}), balanced_lqi(t, kDefaultCosts.th_lqi, {}),
                  bpr(t, 5, {}), lqi_baseline(t, kDefaultCosts.th_lqi)})
                require(base <= eval_total_hops(rt),
                        "path baseline beaten at " + str(nc) + " nodes");
        }
    }
}

// ---- criterion 7: loss trend ------------------------------------------------

void criterion_loss_trend() {
    for (const double alpha : {0.3, 0.5, 1.0}) {
        const auto start = std::chrono::steady_clock::now();
        std::map<std::string, std::vector<double>> loss;
        int topo_index = 0;
        for (const Topology& t : grid_topologies(50, 10)) {
            const std::map<std::string, RoutingTable> tables{
                {"rall", rall(t, kDefaultCosts, {})},
                {"balanced_lqi", balanced_lqi(t, kDefaultCosts.th_lqi, {})},
                {"path", path_baseline(t)},
            };
            for (int s = 0; s < 4; ++s) {
                SimConfig cfg;  // default Table-1/2 parameters
                cfg.loss_alpha = alpha;
                cfg.seed = simulation_seed(kGridSeed, 50, topo_index, s);
                for (const auto& [name, rt] : tables)
                    loss[name].push_back(loss_rate(run_simulation(t, rt, cfg)));
            }
            ++topo_index;
        }
        const double path_mean = mean_of(loss.at("path"));
        const double rall_mean = mean_of(loss.at("rall"));
        const double balanced_mean = mean_of(loss.at("balanced_lqi"));
        require(rall_mean < path_mean - 0.01,
                "alpha " + str(alpha) + ": rall loss margin " + str(path_mean - rall_mean));
        require(balanced_mean < path_mean - 0.01,
                "alpha " + str(alpha) + ": balanced loss margin " + str(path_mean - balanced_mean));
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        require(elapsed < 300.0,
                "loss trend at alpha " + str(alpha) + " took " + str(elapsed) + " s");
    }
}

// ---- criterion 8: lifetime trend ---------------------------------------------

void criterion_lifetime_trend() {
    // Traffic raised until the busiest node's battery empties in every run.
    for (int nc : {40, 50}) {
        std::map<std::string, std::vector<double>> life;
        int topo_index = 0;
        for (const Topology& t : grid_topologies(nc, 10)) {
            const std::map<std::string, RoutingTable> tables{
                {"rall", rall(t, kDefaultCosts, {})},
                {"balanced_lqi", balanced_lqi(t, kDefaultCosts.th_lqi, {})},
            };
            for (int s = 0; s < 4; ++s) {
                SimConfig cfg;
                cfg.gen_rate = 60.0;     // raised from 5 packets/minute
                cfg.duration = 3600.0;   // raised until first deaths are certain
                cfg.seed = simulation_seed(kGridSeed, nc, topo_index, s);
                for (const auto& [name, rt] : tables) {
                    const SimResult r = run_simulation(t, rt, cfg);
                    require(r.lifetime_ns.has_value(),
                            "no node died in a " + name + " run at " + str(nc) + " nodes");
                    life[name].push_back(*r.lifetime_s());
                }
            }
            ++topo_index;
        }
        const double rall_mean = mean_of(life.at("rall"));
        const double balanced_mean = mean_of(life.at("balanced_lqi"));
        require(rall_mean >= balanced_mean,
                "mean lifetime at " + str(nc) + " nodes: rall " + str(rall_mean) +
                    " vs balanced " + str(balanced_mean));
    }
}

// ---- criterion 9: simulator micro-oracles -------------------------------------

void criterion_simulator_micro() {
    // (a) Single-hop latency: exactly 127*8/250000 s plus configured
    // contention, on the nanosecond event clock.
    {
        Topology t;
        t.area_side = 50;
        t.range = 50;
        t.sink = 0;
        t.positions = {{25, 25}, {26, 25}};
        t.links = {{1, 0, 255}};
        t.rebuild_index();
        const RoutingTable rt = path_baseline(t);
        SimConfig cfg;
        cfg.duration = 30.0;
        bool found = false;
        for (std::uint64_t seed = 0; seed < 5000 && !found; ++seed) {
            cfg.seed = seed;
            const SimResult r = run_simulation(t, rt, cfg);
            if (r.packets.size() != 1) continue;
            found = true;
            const PacketRecord& p = r.packets.front();
            require(p.delivered_at_ns.has_value(), "single packet not delivered");
            require(*p.latency_ns() == 4064000,  // 127*8/250000 s in ns
                    "single-hop latency " + str(*p.latency_ns()) + " ns");
            require(r.node_energy_trace.at(1) == cfg.initial_energy - cfg.tx_energy,
                    "sender energy after one send");
            require(r.node_energy_trace.at(0) == cfg.initial_energy - cfg.rx_energy,
                    "sink energy after one reception");
        }
        require(found, "no seed with exactly one packet");
    }
    // (b) Contention term: relay with routing load 2 adds exactly 2*50 ms.
    {
        std::vector<DirectedLink> links{{1, 0, 255}, {2, 1, 255}};
        Topology t;
        t.area_side = 50;
        t.range = 50;
        t.sink = 0;
        t.positions = {{25, 25}, {26, 25}, {27, 25}};
        t.links = links;
        t.rebuild_index();
        const RoutingTable rt = path_baseline(t);
        SimConfig cfg;
        cfg.duration = 2.0;
        bool found = false;
        for (std::uint64_t seed = 0; seed < 20000 && !found; ++seed) {
            cfg.seed = seed;
            const SimResult r = run_simulation(t, rt, cfg);
            if (r.packets.size() != 1 || r.packets.front().source != 2) continue;
            found = true;
            require(*r.packets.front().latency_ns() == (4064000 + 2 * 50000000LL) + 4064000,
                    "two-hop contended latency");
        }
        require(found, "no seed with exactly one two-hop packet");
    }
    // (c) Per-node energy ledger balances exactly against the packet records.
    {
        const Topology t = generate_topology(12, 50.0, 18.0, {}, 8);
        const RoutingTable rt = rall(t, kDefaultCosts, {});
        SimConfig cfg;
        cfg.duration = 300.0;
        cfg.seed = 99;
        const SimResult r = run_simulation(t, rt, cfg);
        require(r.packets.size() > 100, "ledger run generated too little traffic");
        std::vector<long> tx(t.node_count(), 0), rx(t.node_count(), 0);
        for (const PacketRecord& p : r.packets) {
            const auto& route = rt.paths.at(p.source).hops;
            for (size_t h = 0; h < route.size(); ++h) tx[route[h].src] += p.attempts_per_hop[h];
            for (int h = 0; h < p.hops_traversed; ++h) rx[route[h].dst] += 1;
        }
        for (NodeId v = 0; v < t.node_count(); ++v) {
            require(tx[v] == r.node_tx_attempts.at(v), "attempt recount at node " + str(v));
            require(rx[v] == r.node_rx_count.at(v), "reception recount at node " + str(v));
            require(r.node_energy_trace.at(v) ==
                        cfg.initial_energy - cfg.tx_energy * tx[v] - cfg.rx_energy * rx[v],
                    "energy ledger at node " + str(v));
        }
    }
    // (d) Monte-Carlo delivery at p=0.5 with three attempts: 0.875 +- 0.02.
    {
        Topology t;
        t.area_side = 50;
        t.range = 50;
        t.sink = 0;
        t.positions = {{25, 25}, {26, 25}};
        t.links = {{1, 0, 128}};
        t.rebuild_index();
        const RoutingTable rt = path_baseline(t);
        SimConfig cfg;
        cfg.loss_alpha = std::log(0.5) / std::log(128.0 / 255.0);  // p = 0.5 exactly
        cfg.gen_rate = 600.0;
        cfg.duration = 1100.0;
        cfg.initial_energy = 1e9;
        cfg.max_retries = 3;
        cfg.seed = 4242;
        const SimResult r = run_simulation(t, rt, cfg);
        require(r.packets.size() >= 10000, "need at least 10^4 packets");
        const double rate = static_cast<double>(r.delivered_count()) / r.packets.size();
        require(std::abs(rate - 0.875) <= 0.02,
                "delivery rate " + str(rate) + " vs analytic 0.875");
    }
}

// ---- criterion 10: pipeline determinism ---------------------------------------

void criterion_compare_determinism() {
    const fs::path base = fs::temp_directory_path() / "rallnet_acceptance_compare";
    fs::remove_all(base);
    ExperimentConfig cfg;
    cfg.master_seed = kGridSeed;
    cfg.node_counts = {10, 20};
    cfg.topologies_per_count = 3;
    cfg.seeds_per_topology = 2;
    cfg.sim.duration = 60.0;

    auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        require(in.good(), "missing output file " + p.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    std::vector<std::pair<std::string, int>> variants{
        {"serial_a", 1}, {"serial_b", 1}, {"parallel", 4}};
    std::map<std::string, std::string> runs, agg;
    for (const auto& [name, workers] : variants) {
        cfg.out_dir = (base / name).string();
        cfg.parallel = workers;
        const CompareOutcome outcome = run_compare(cfg);
        require(outcome.failures.empty(), "compare cells failed in " + name);
        require(outcome.rows.size() == 2u * 3 * 2 * 5, "unexpected grid size in " + name);
        runs[name] = read(base / name / "runs.csv");
        agg[name] = read(base / name / "aggregate.csv");
    }
    require(runs.at("serial_a") == runs.at("serial_b"), "serial reruns differ (runs.csv)");
    require(agg.at("serial_a") == agg.at("serial_b"), "serial reruns differ (aggregate.csv)");
    require(runs.at("serial_a") == runs.at("parallel"), "parallel runs.csv differs from serial");
    require(agg.at("serial_a") == agg.at("parallel"),
            "parallel aggregate.csv differs from serial");
    fs::remove_all(base);
}

struct Criterion {
    int id;
    const char* title;
    std::function<void()> run;
};

const std::vector<Criterion> kCriteria{
    {1, "oracle optimality floor on 50 small topologies", criterion_oracle_floor},
    {2, "reduction identities to the hop and quality baselines", criterion_reduction_identities},
    {3, "load tallies consistent across 100 routing runs", criterion_load_tallies},
    {4, "fairness trend: rall and balanced_lqi beat path on Jain index", criterion_jain_trend},
    {5, "bottleneck trend: rall max load not above path", criterion_bottleneck_trend},
    {6, "path-length trend: rall below balanced_lqi, path minimal", criterion_pathlen_trend},
    {7, "loss trend under three loss exponents", criterion_loss_trend},
    {8, "lifetime trend: rall outlives balanced_lqi at 40 and 50 nodes",
     criterion_lifetime_trend},
    {9, "simulator micro-oracles: timing, energy ledger, Monte-Carlo delivery",
     criterion_simulator_micro},
    {10, "compare pipeline byte-determinism, serial and parallel",
     criterion_compare_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run();
            const double s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::printf("[PASS] criterion %2d: %s (%.1f s)\n", c.id, c.title, s);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %2d: %s -- %s\n", c.id, c.title, e.what());
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
