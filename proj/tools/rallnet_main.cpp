#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "rallnet/experiment.hpp"

namespace {

// Precedence: --seed flag, then RALL_NET_SEED, then the config file.
void apply_seed_overrides(rallnet::ExperimentConfig& cfg, bool seed_flag_set,
                          std::uint64_t seed_flag) {
    if (const char* env = std::getenv("RALL_NET_SEED")) {
        try {
            cfg.master_seed = std::stoull(env);
        } catch (const std::exception&) {
            throw rallnet::ConfigError("RALL_NET_SEED is not a valid integer");
        }
    }
    if (seed_flag_set) cfg.master_seed = seed_flag;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RALL WSN routing experiments: topology generation, routing, "
                 "traffic simulation, and algorithm comparison"};
    app.require_subcommand(1);

    std::string config_file;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;
    std::string out;
    std::string algo = "rall";
    std::vector<int> nodes;
    int parallel = 0;

    app.add_option("--config", config_file, "TOML experiment config")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed_flag, "master seed (overrides config and env)");
    app.add_option("--out", out, "output directory");
    app.add_option("--parallel", parallel, "worker threads for compare");

    auto* gen = app.add_subcommand("gen", "generate topology files");
    gen->fallthrough();
    gen->add_option("--nodes", nodes, "node counts to generate")->delimiter(',');

    auto* route = app.add_subcommand("route", "compute a routing table for one topology");
    route->fallthrough();
    std::string topo_file, routes_file, routes_out = "routes.json";
    route->add_option("--topo", topo_file, "topology JSON file")->required();
    route->add_option("--algo", algo, "rall|balanced_lqi|bpr|path|lqi");
    route->add_option("--routes-out", routes_out, "output routing-table file");

    auto* simulate = app.add_subcommand("simulate", "run one traffic simulation");
    simulate->fallthrough();
    bool packets_csv = false;
    simulate->add_option("--topo", topo_file, "topology JSON file")->required();
    simulate->add_option("--routes", routes_file, "routing-table JSON file")->required();
    simulate->add_flag("--packets-csv", packets_csv, "also write per-packet CSV");

    auto* compare = app.add_subcommand("compare", "run the full comparison grid");
    compare->fallthrough();
    compare->add_option("--nodes", nodes, "node counts to compare")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    seed_set = seed_opt->count() > 0;

    try {
        rallnet::ExperimentConfig cfg;
        if (!config_file.empty()) cfg = rallnet::load_experiment_config(config_file);
        apply_seed_overrides(cfg, seed_set, seed_flag);
        if (!out.empty()) cfg.out_dir = out;
        if (!nodes.empty()) cfg.node_counts = nodes;
        if (parallel > 0) cfg.parallel = parallel;
        cfg.validate();

        if (gen->parsed()) return rallnet::cmd_gen(cfg);
        if (route->parsed()) return rallnet::cmd_route(topo_file, algo, cfg, routes_out);
        if (simulate->parsed())
            return rallnet::cmd_simulate(topo_file, routes_file, cfg,
                                         cfg.out_dir, packets_csv);
        if (compare->parsed()) return rallnet::cmd_compare(cfg);
    } catch (const rallnet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const rallnet::UnknownAlgorithm& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
