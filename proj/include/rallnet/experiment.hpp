#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rallnet/costs.hpp"
#include "rallnet/metrics.hpp"
#include "rallnet/routing.hpp"
#include "rallnet/simulator.hpp"
#include "rallnet/toml_lite.hpp"
#include "rallnet/topology.hpp"

namespace rallnet {

// Full description of one comparison experiment: the topology grid, the
// algorithms to race, and every model parameter. Loadable from a TOML file;
// defaults reproduce the standard 5-counts x 10-topologies x 4-seeds grid.
struct ExperimentConfig {
    std::uint64_t master_seed = 1;

    std::vector<int> node_counts = {10, 20, 30, 40, 50};
    int topologies_per_count = 10;
    int seeds_per_topology = 4;
    std::vector<std::string> algorithms = {"rall", "balanced_lqi", "bpr", "path", "lqi"};
    int parallel = 1;
    std::string out_dir = "out";

    double area_side = 50.0;
    double range = 12.0;
    LqiModelParams lqi_params;

    CostParams cost_params;
    FlowOrdering ordering;
    int bpr_k = 5;

    SimConfig sim;  // per-run seed is derived, not taken from here

    void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_toml(const TomlLite& doc);
ExperimentConfig load_experiment_config(const std::string& path);

// Derived seeds: master mixed with fixed stream tags and grid indices.
std::uint64_t topology_seed(std::uint64_t master, int node_count, int topo_index);
std::uint64_t simulation_seed(std::uint64_t master, int node_count, int topo_index,
                              int seed_index);

// Dispatch by name: rall | balanced_lqi | bpr | path | lqi.
RoutingTable run_algorithm(const std::string& name, const Topology& t,
                           const ExperimentConfig& cfg);

// One metrics row of the run-level CSV, or the error that killed the cell.
struct RunCell {
    int node_count = 0;
    int topo_index = 0;
    int seed_index = 0;
    std::string algorithm;
    std::uint64_t sim_seed = 0;
    MetricsReport metrics;
    std::string error;  // empty on success

    std::string topology_id() const;
};

struct CompareOutcome {
    std::vector<RunCell> rows;          // grid order, failures included
    std::vector<std::string> failures;  // human-readable cell errors
};

// Full grid run: topologies, routes, simulations, metrics, aggregate CSV and
// plot scripts under cfg.out_dir. Cells run in parallel (cfg.parallel
// workers); outputs are byte-identical regardless of scheduling.
CompareOutcome run_compare(const ExperimentConfig& cfg);

// CLI entry points; return process exit codes (0 ok, 2 runtime failure).
int cmd_gen(const ExperimentConfig& cfg);
int cmd_route(const std::string& topology_file, const std::string& algorithm,
              const ExperimentConfig& cfg, const std::string& out_file);
int cmd_simulate(const std::string& topology_file, const std::string& routes_file,
                 const ExperimentConfig& cfg, const std::string& out_dir,
                 bool packets_csv = false);
int cmd_compare(const ExperimentConfig& cfg);

}  // namespace rallnet
