#include "rallnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "rallnet/rng.hpp"

namespace fs = std::filesystem;

namespace rallnet {

namespace {
constexpr std::uint64_t kTopologyStream = 0x746f706fULL;  // "topo"
constexpr std::uint64_t kSimStream = 0x73696d75ULL;       // "simu"
constexpr double kZ95 = 1.959963984540054;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }
}  // namespace

void ExperimentConfig::validate() const {
    if (node_counts.empty()) throw ConfigError("node_counts must not be empty");
    for (int n : node_counts)
        if (n < 2) throw ConfigError("node counts must be >= 2");
    if (topologies_per_count < 1 || seeds_per_topology < 1)
        throw ConfigError("grid counts must be >= 1");
    if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
    for (const std::string& a : algorithms)
        if (a != "rall" && a != "balanced_lqi" && a != "bpr" && a != "path" && a != "lqi")
            throw UnknownAlgorithm("unknown algorithm: " + a);
    if (!cost_params.valid()) throw ConfigError("cost weights must be in [0,1] and sum to 1");
    if (area_side <= 0 || range <= 0) throw ConfigError("area_side and range must be positive");
    if (sim.duration <= 0) throw ConfigError("sim duration must be positive");
    if (parallel < 1) throw ConfigError("parallel must be >= 1");
    if (bpr_k < 1) throw ConfigError("bpr_k must be >= 1");
}

ExperimentConfig config_from_toml(const TomlLite& doc) {
    ExperimentConfig c;
    c.master_seed = static_cast<std::uint64_t>(doc.get_int("master_seed", 1));

    std::vector<std::int64_t> counts =
        doc.get_int_array("experiment.node_counts", {10, 20, 30, 40, 50});
    c.node_counts.assign(counts.begin(), counts.end());
    c.topologies_per_count =
        static_cast<int>(doc.get_int("experiment.topologies_per_count", c.topologies_per_count));
    c.seeds_per_topology =
        static_cast<int>(doc.get_int("experiment.seeds_per_topology", c.seeds_per_topology));
    c.algorithms = doc.get_string_array("experiment.algorithms", c.algorithms);
    c.parallel = static_cast<int>(doc.get_int("experiment.parallel", c.parallel));
    c.out_dir = doc.get_string("experiment.out_dir", c.out_dir);

    c.area_side = doc.get_double("topology.area_side", c.area_side);
    c.range = doc.get_double("topology.range", c.range);
    c.lqi_params.gamma = doc.get_double("topology.lqi_gamma", c.lqi_params.gamma);
    c.lqi_params.sigma = doc.get_double("topology.lqi_sigma", c.lqi_params.sigma);

    c.cost_params.w_p = doc.get_double("cost.w_p", c.cost_params.w_p);
    c.cost_params.w_l = doc.get_double("cost.w_l", c.cost_params.w_l);
    c.cost_params.th_lqi = static_cast<int>(doc.get_int("cost.th_lqi", c.cost_params.th_lqi));
    c.cost_params.p_const = static_cast<int>(doc.get_int("cost.p_const", c.cost_params.p_const));

    const std::string ord = doc.get_string("routing.ordering", "nearest_first");
    if (ord == "nearest_first") c.ordering.strategy = OrderingStrategy::NearestFirst;
    else if (ord == "farthest_first") c.ordering.strategy = OrderingStrategy::FarthestFirst;
    else if (ord == "node_id") c.ordering.strategy = OrderingStrategy::NodeIdAscending;
    else if (ord == "random") c.ordering.strategy = OrderingStrategy::RandomSeeded;
    else throw ConfigError("unknown routing.ordering: " + ord);
    c.ordering.seed = static_cast<std::uint64_t>(doc.get_int("routing.ordering_seed", 0));
    c.bpr_k = static_cast<int>(doc.get_int("routing.bpr_k", c.bpr_k));

    c.sim.gen_rate = doc.get_double("sim.gen_rate", c.sim.gen_rate);
    c.sim.duration = doc.get_double("sim.duration", c.sim.duration);
    c.sim.initial_energy = doc.get_double("sim.initial_energy", c.sim.initial_energy);
    c.sim.tx_energy = doc.get_double("sim.tx_energy", c.sim.tx_energy);
    c.sim.rx_energy = doc.get_double("sim.rx_energy", c.sim.rx_energy);
    c.sim.packet_size = static_cast<int>(doc.get_int("sim.packet_size", c.sim.packet_size));
    c.sim.link_rate = doc.get_double("sim.link_rate", c.sim.link_rate);
    c.sim.max_retries = static_cast<int>(doc.get_int("sim.max_retries", c.sim.max_retries));
    c.sim.contention_delay_per_load =
        doc.get_double("sim.contention_delay_per_load", c.sim.contention_delay_per_load);
    c.sim.control_packets_per_hop =
        doc.get_double("sim.control_packets_per_hop", c.sim.control_packets_per_hop);
    c.sim.loss_alpha = doc.get_double("sim.loss_alpha", c.sim.loss_alpha);

    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return config_from_toml(TomlLite::parse_file(path));
}

std::uint64_t topology_seed(std::uint64_t master, int node_count, int topo_index) {
    return mix_seed(master, {kTopologyStream, static_cast<std::uint64_t>(node_count),
                             static_cast<std::uint64_t>(topo_index)});
}

std::uint64_t simulation_seed(std::uint64_t master, int node_count, int topo_index,
                              int seed_index) {
    return mix_seed(master, {kSimStream, static_cast<std::uint64_t>(node_count),
                             static_cast<std::uint64_t>(topo_index),
                             static_cast<std::uint64_t>(seed_index)});
}

RoutingTable run_algorithm(const std::string& name, const Topology& t,
                           const ExperimentConfig& cfg) {
    if (name == "rall") return rall(t, cfg.cost_params, cfg.ordering);
    if (name == "balanced_lqi") return balanced_lqi(t, cfg.cost_params.th_lqi, cfg.ordering);
    if (name == "bpr") return bpr(t, cfg.bpr_k, cfg.ordering);
    if (name == "path") return path_baseline(t);
    if (name == "lqi") return lqi_baseline(t, cfg.cost_params.th_lqi);
    throw UnknownAlgorithm("unknown algorithm: " + name);
}

std::string RunCell::topology_id() const {
    return "nc" + std::to_string(node_count) + "_t" + std::to_string(topo_index);
}

namespace {

struct Agg {
    double mean = 0.0;
    double ci95 = 0.0;
    long n = 0;
};

Agg aggregate_values(const std::vector<double>& values) {
    Agg a;
    double sum = 0.0;
    for (double v : values) {
        if (std::isnan(v)) continue;
        sum += v;
        ++a.n;
    }
    if (a.n == 0) {
        a.mean = nan_value();
        a.ci95 = nan_value();
        return a;
    }
    a.mean = sum / a.n;
    if (a.n >= 2) {
        double ss = 0.0;
        for (double v : values) {
            if (std::isnan(v)) continue;
            ss += (v - a.mean) * (v - a.mean);
        }
        a.ci95 = kZ95 * std::sqrt(ss / (a.n - 1) / a.n);
    }
    return a;
}

// Metric accessors shared by the aggregate CSV and the plot data files.
struct MetricColumn {
    const char* name;    // column stem and plot file stem
    const char* label;   // y-axis label
    double (*get)(const RunCell&);
};

const MetricColumn kMetricColumns[] = {
    {"loss", "Packet loss rate", [](const RunCell& r) { return r.metrics.loss_rate; }},
    {"jain", "Jain fairness index", [](const RunCell& r) { return r.metrics.jain; }},
    {"latency_mean", "Mean end-to-end latency (s)",
     [](const RunCell& r) { return r.metrics.mean_latency; }},
    {"pathlen", "Average path length (hops)",
     [](const RunCell& r) { return r.metrics.avg_path_length; }},
    {"lifetime", "Network lifetime (s)",
     [](const RunCell& r) { return r.metrics.lifetime ? *r.metrics.lifetime : nan_value(); }},
    {"overhead", "Control packets per delivered packet",
     [](const RunCell& r) { return r.metrics.control_overhead; }},
    {"maxload", "Max node load (flows)",
     [](const RunCell& r) { return static_cast<double>(r.metrics.max_node_load); }},
};

std::vector<const RunCell*> cells_for(const std::vector<RunCell>& rows, int node_count,
                                      const std::string& algo) {
    std::vector<const RunCell*> out;
    for (const RunCell& r : rows)
        if (r.node_count == node_count && r.algorithm == algo && r.error.empty())
            out.push_back(&r);
    return out;
}

void write_runs_csv(const std::vector<RunCell>& rows, const fs::path& path) {
    std::ofstream out(path);
    out << metrics_csv_header() << "\n";
    for (const RunCell& r : rows) {
        if (!r.error.empty()) continue;
        out << metrics_csv_row(r.topology_id(), r.sim_seed, r.algorithm, r.node_count, r.metrics)
            << "\n";
    }
}

void write_aggregate_csv(const ExperimentConfig& cfg, const std::vector<RunCell>& rows,
                         const fs::path& path) {
    std::ofstream out(path);
    out << "node_count,algorithm,runs";
    for (const MetricColumn& m : kMetricColumns) out << ',' << m.name << "_mean,"
                                                     << m.name << "_ci95";
    out << "\n";
    for (int nc : cfg.node_counts) {
        for (const std::string& algo : cfg.algorithms) {
            const std::vector<const RunCell*> cells = cells_for(rows, nc, algo);
            out << nc << ',' << algo << ',' << cells.size();
            for (const MetricColumn& m : kMetricColumns) {
                std::vector<double> vals;
                vals.reserve(cells.size());
                for (const RunCell* c : cells) vals.push_back(m.get(*c));
                const Agg a = aggregate_values(vals);
                out << ',' << csv_double(a.mean) << ',' << csv_double(a.ci95);
            }
            out << "\n";
        }
    }
}

void write_metric_plot(const ExperimentConfig& cfg, const std::vector<RunCell>& rows,
                       const MetricColumn& metric, const fs::path& plots_dir) {
    const std::string csv_name = std::string(metric.name) + ".csv";
    {
        std::ofstream out(plots_dir / csv_name);
        out << "node_count";
        for (const std::string& algo : cfg.algorithms)
            out << ',' << algo << "_mean," << algo << "_ci95";
        out << "\n";
        for (int nc : cfg.node_counts) {
            out << nc;
            for (const std::string& algo : cfg.algorithms) {
                std::vector<double> vals;
                for (const RunCell* c : cells_for(rows, nc, algo)) vals.push_back(metric.get(*c));
                const Agg a = aggregate_values(vals);
                out << ',' << csv_double(a.mean) << ',' << csv_double(a.ci95);
            }
            out << "\n";
        }
    }
    std::ofstream gp(plots_dir / (std::string(metric.name) + ".gp"));
    gp << "set datafile separator ','\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output '" << metric.name << ".png'\n"
       << "set xlabel 'Number of nodes'\n"
       << "set ylabel '" << metric.label << "'\n"
       << "set key top left\n"
       << "set grid\n";
    gp << "plot ";
    for (size_t i = 0; i < cfg.algorithms.size(); ++i) {
        const int mean_col = static_cast<int>(2 + 2 * i);
        if (i) gp << ", \\\n     ";
        gp << "'" << csv_name << "' using 1:" << mean_col << ":" << mean_col + 1
           << " with yerrorlines title '" << cfg.algorithms[i] << "'";
    }
    gp << "\n";
}

void write_latency_plot(const ExperimentConfig& cfg, const std::vector<RunCell>& rows,
                        const fs::path& plots_dir) {
    // One clustered-histogram data file per node count: summed bucket counts.
    for (int nc : cfg.node_counts) {
        std::map<std::string, std::vector<long>> per_algo;
        size_t buckets = 1;
        for (const std::string& algo : cfg.algorithms) {
            std::vector<long> sum;
            for (const RunCell* c : cells_for(rows, nc, algo)) {
                const auto& counts = c->metrics.latency_hist.counts;
                if (sum.size() < counts.size()) sum.resize(counts.size(), 0);
                for (size_t b = 0; b < counts.size(); ++b) sum[b] += counts[b];
            }
            buckets = std::max(buckets, sum.size());
            per_algo[algo] = std::move(sum);
        }
        std::ofstream out(plots_dir / ("latency_nc" + std::to_string(nc) + ".csv"));
        out << "bucket_start_ms";
        for (const std::string& algo : cfg.algorithms) out << ',' << algo;
        out << "\n";
        for (size_t b = 0; b < buckets; ++b) {
            out << b * 600;
            for (const std::string& algo : cfg.algorithms) {
                const auto& sum = per_algo[algo];
                out << ',' << (b < sum.size() ? sum[b] : 0);
            }
            out << "\n";
        }
    }
    std::ofstream gp(plots_dir / "latency.gp");
    gp << "set datafile separator ','\n"
       << "set terminal pngcairo size 1400,900\n"
       << "set output 'latency.png'\n"
       << "set style data histograms\n"
       << "set style histogram clustered gap 1\n"
       << "set style fill solid 0.8\n"
       << "set multiplot layout " << (cfg.node_counts.size() + 1) / 2 << ",2"
       << " title 'Delivered packets per 600 ms latency bucket'\n"
       << "set xlabel 'Bucket start (ms)'\n"
       << "set ylabel 'Delivered packets'\n";
    for (int nc : cfg.node_counts) {
        gp << "set title '" << nc << " nodes'\n";
        gp << "plot ";
        for (size_t i = 0; i < cfg.algorithms.size(); ++i) {
            if (i) gp << ", \\\n     ";
            if (i == 0)
                gp << "'latency_nc" << nc << ".csv' using 2:xtic(1) title '" << cfg.algorithms[i]
                   << "'";
            else
                gp << "'' using " << 2 + i << " title '" << cfg.algorithms[i] << "'";
        }
        gp << "\n";
    }
    gp << "unset multiplot\n";
}

}  // namespace

CompareOutcome run_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path out_dir(cfg.out_dir);
    const fs::path topo_dir = out_dir / "topologies";
    const fs::path plots_dir = out_dir / "plots";
    fs::create_directories(topo_dir);
    fs::create_directories(plots_dir);

    struct Task {
        int node_count;
        int topo_index;
    };
    std::vector<Task> tasks;
    for (int nc : cfg.node_counts)
        for (int t = 0; t < cfg.topologies_per_count; ++t) tasks.push_back({nc, t});

    const size_t algos = cfg.algorithms.size();
    const size_t seeds = static_cast<size_t>(cfg.seeds_per_topology);
    CompareOutcome outcome;
    outcome.rows.resize(tasks.size() * algos * seeds);

    auto run_task = [&](size_t task_index) {
        const Task& task = tasks[task_index];
        const size_t base = task_index * algos * seeds;
        for (size_t a = 0; a < algos; ++a) {
            for (size_t s = 0; s < seeds; ++s) {
                RunCell& cell = outcome.rows[base + a * seeds + s];
                cell.node_count = task.node_count;
                cell.topo_index = task.topo_index;
                cell.seed_index = static_cast<int>(s);
                cell.algorithm = cfg.algorithms[a];
                cell.sim_seed = simulation_seed(cfg.master_seed, task.node_count, task.topo_index,
                                                static_cast<int>(s));
            }
        }
        Topology topo;
        try {
            topo = generate_topology(task.node_count, cfg.area_side, cfg.range, cfg.lqi_params,
                                     topology_seed(cfg.master_seed, task.node_count,
                                                   task.topo_index));
            save_topology(topo, (topo_dir / (outcome.rows[base].topology_id() + ".json")).string());
        } catch (const std::exception& e) {
            for (size_t i = 0; i < algos * seeds; ++i) outcome.rows[base + i].error = e.what();
            return;
        }
        for (size_t a = 0; a < algos; ++a) {
            RoutingTable rt;
            try {
                rt = run_algorithm(cfg.algorithms[a], topo, cfg);
            } catch (const std::exception& e) {
                for (size_t s = 0; s < seeds; ++s)
                    outcome.rows[base + a * seeds + s].error = e.what();
                continue;
            }
            for (size_t s = 0; s < seeds; ++s) {
                RunCell& cell = outcome.rows[base + a * seeds + s];
                try {
                    SimConfig sim = cfg.sim;
                    sim.seed = cell.sim_seed;
                    const SimResult result = run_simulation(topo, rt, sim);
                    cell.metrics = compute_metrics(rt, result);
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
            }
        }
    };

    const int workers = std::max(1, cfg.parallel);
    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<size_t> next{0};
        auto loop = [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                run_task(i);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(loop);
        loop();
        for (std::thread& th : pool) th.join();
    }

    for (const RunCell& r : outcome.rows)
        if (!r.error.empty())
            outcome.failures.push_back(r.topology_id() + "/" + r.algorithm + "/seed" +
                                       std::to_string(r.seed_index) + ": " + r.error);

    write_runs_csv(outcome.rows, out_dir / "runs.csv");
    write_aggregate_csv(cfg, outcome.rows, out_dir / "aggregate.csv");
    for (const MetricColumn& m : kMetricColumns) write_metric_plot(cfg, outcome.rows, m, plots_dir);
    write_latency_plot(cfg, outcome.rows, plots_dir);
    if (!outcome.failures.empty()) {
        std::ofstream fail(out_dir / "failures.txt");
        for (const std::string& f : outcome.failures) fail << f << "\n";
    }
    return outcome;
}

int cmd_gen(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path topo_dir = fs::path(cfg.out_dir) / "topologies";
    fs::create_directories(topo_dir);
    int failures = 0;
    for (int nc : cfg.node_counts) {
        for (int t = 0; t < cfg.topologies_per_count; ++t) {
            const std::string name = "nc" + std::to_string(nc) + "_t" + std::to_string(t);
            try {
                const Topology topo = generate_topology(
                    nc, cfg.area_side, cfg.range, cfg.lqi_params,
                    topology_seed(cfg.master_seed, nc, t));
                save_topology(topo, (topo_dir / (name + ".json")).string());
                std::cout << name << ": " << topo.node_count() << " nodes, " << topo.link_count()
                          << " links\n";
            } catch (const std::exception& e) {
                std::cerr << name << ": " << e.what() << "\n";
                ++failures;
            }
        }
    }
    return failures == 0 ? 0 : 2;
}

int cmd_route(const std::string& topology_file, const std::string& algorithm,
              const ExperimentConfig& cfg, const std::string& out_file) {
    const Topology topo = load_topology(topology_file);
    const RoutingTable rt = run_algorithm(algorithm, topo, cfg);
    save_routing_table(rt, out_file);
    std::cout << algorithm << ": " << rt.paths.size() << " paths, max load "
              << rt.max_node_load() << "\n";
    return 0;
}

int cmd_simulate(const std::string& topology_file, const std::string& routes_file,
                 const ExperimentConfig& cfg, const std::string& out_dir, bool packets_csv) {
    const Topology topo = load_topology(topology_file);
    const RoutingTable rt = load_routing_table(routes_file);
    SimConfig sim = cfg.sim;
    sim.seed = cfg.master_seed;
    const SimResult result = run_simulation(topo, rt, sim);
    const MetricsReport metrics = compute_metrics(rt, result);

    fs::create_directories(out_dir);
    save_sim_result(result, (fs::path(out_dir) / "simresult.json").string());
    {
        std::ofstream out(fs::path(out_dir) / "metrics.csv");
        out << metrics_csv_header() << "\n"
            << metrics_csv_row(fs::path(topology_file).stem().string(), sim.seed, rt.algorithm,
                               topo.node_count(), metrics)
            << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "metrics.json");
        out << to_json(metrics).dump(2) << "\n";
    }
    if (packets_csv) {
        std::ofstream out(fs::path(out_dir) / "packets.csv");
        write_packets_csv(result, out);
    }
    std::cout << "generated " << metrics.generated << ", delivered " << metrics.delivered
              << ", loss " << csv_double(metrics.loss_rate) << "\n";
    return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
    const CompareOutcome outcome = run_compare(cfg);
    const long ok = static_cast<long>(outcome.rows.size()) -
                    static_cast<long>(outcome.failures.size());
    std::cout << ok << "/" << outcome.rows.size() << " runs ok; outputs in " << cfg.out_dir
              << "\n";
    if (!outcome.failures.empty()) {
        std::cerr << outcome.failures.size() << " cells failed:\n";
        for (const std::string& f : outcome.failures) std::cerr << "  " << f << "\n";
        return 2;
    }
    return 0;
}

}  // namespace rallnet
