// Command-line front end.
//
//   d2dmab simulate --config <file> [--policy <kind|list|all>] [--seed <n>]
//                   [--out <dir>] [--workers <n>] [--plots]
//   d2dmab oracle   --config <file> --topology-seed <n>
//   d2dmab replay   --manifest <file> [--out <dir>] [--workers <n>] [--plots]

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "d2dmab/d2dmab.hpp"

namespace {

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs every requested policy over the same seeds; the channel streams are
// policy-independent, so curves are directly comparable.
void run_policies(d2dmab::ExperimentConfig cfg,
                  const std::vector<d2dmab::PolicyKind>& kinds,
                  const std::string& out_dir, int workers, bool plots) {
    std::vector<d2dmab::ExperimentResult> results;
    for (d2dmab::PolicyKind kind : kinds) {
        cfg.policy.kind = kind;
        std::cout << "running " << d2dmab::to_string(kind) << ": "
                  << cfg.mc_topologies << " topologies x " << cfg.mc_runs_per_topology
                  << " runs x " << cfg.horizon << " subframes..." << std::flush;
        results.push_back(d2dmab::run_experiment(cfg, workers));
        double secs = 0.0;
        for (const auto& r : results.back().records) secs += r.wall_seconds;
        std::cout << " done (" << d2dmab::fmt(secs, 3) << " cpu-s)\n";
    }
    d2dmab::emit_outputs(results, out_dir);
    if (plots) d2dmab::emit_plots(results, out_dir);
    std::cout << "wrote " << out_dir << "/\n";
}

int cmd_simulate(const std::string& config_path, const std::string& policy_arg,
                 std::uint64_t seed, bool seed_set, const std::string& out_arg,
                 int workers, bool plots) {
    d2dmab::ExperimentConfig cfg = d2dmab::load_config(config_path);
    if (seed_set) cfg.master_seed = seed;
    const std::vector<d2dmab::PolicyKind> kinds =
        policy_arg.empty() ? std::vector<d2dmab::PolicyKind>{cfg.policy.kind}
                           : d2dmab::parse_policy_list(policy_arg);
    const std::string out_dir = out_arg.empty() ? cfg.output_dir : out_arg;
    run_policies(cfg, kinds, out_dir, workers, plots);
    return 0;
}

int cmd_oracle(const std::string& config_path, std::uint64_t topology_seed) {
    const d2dmab::ExperimentConfig cfg = d2dmab::load_config(config_path);
    const d2dmab::Topology topo = d2dmab::generate_topology(
        cfg.n_cu, cfg.n_d2d, cfg.cell_radius, cfg.d2d_range, topology_seed);
    const d2dmab::LargeScaleGains ls = d2dmab::draw_large_scale(topo, cfg.make_channel());
    const std::uint64_t seed = d2dmab::rng::split(topology_seed, d2dmab::rng::kTagOracle);

    for (const auto model :
         {d2dmab::RewardModel::normalized, d2dmab::RewardModel::bernoulli}) {
        const d2dmab::ArmMeansOracle o = d2dmab::estimate_arm_means(
            topo, ls, cfg.make_phy(), cfg.oracle_samples, seed, model,
            cfg.fading_enabled);
        std::cout << (model == d2dmab::RewardModel::normalized
                          ? "# mean normalized-throughput reward"
                          : "# mean Bernoulli reward")
                  << " per (player, CU); " << o.estimation_samples
                  << " samples per cell, topology seed " << topology_seed << "\n";
        std::cout << "player";
        for (int c = 1; c <= o.n_cu; ++c) std::cout << "\tcu" << c;
        std::cout << "\tbest_cu\n";
        for (int d = 1; d <= o.n_d2d; ++d) {
            std::cout << d;
            for (int c = 1; c <= o.n_cu; ++c) std::cout << "\t" << d2dmab::fmt(o.mu(d, c), 6);
            std::cout << "\t" << o.best_arm[d - 1] << "\n";
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_arg,
               int workers, bool plots) {
    std::map<std::string, std::string> extra;
    d2dmab::ExperimentConfig cfg = d2dmab::load_config(manifest_path, &extra);
    std::vector<d2dmab::PolicyKind> kinds{cfg.policy.kind};
    if (auto it = extra.find("policies"); it != extra.end())
        kinds = d2dmab::parse_policy_list(it->second);
    const std::string out_dir = out_arg.empty() ? cfg.output_dir + "_replay" : out_arg;
    run_policies(cfg, kinds, out_dir, workers, plots);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D2D underlay resource allocation, learned with multi-player bandits"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, policy_arg, out_arg;
    std::uint64_t seed = 0, topology_seed = 0;
    int workers = default_workers();
    bool plots = false;

    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    simulate->add_option("--config", config_path, "experiment config file")->required();
    simulate->add_option("--policy", policy_arg,
                         "policy kind, comma list, or 'all' (default: config)");
    CLI::Option* seed_opt =
        simulate->add_option("--seed", seed, "override master_seed");
    simulate->add_option("--out", out_arg, "output directory (default: config)");
    simulate->add_option("--workers", workers, "parallel run workers");
    simulate->add_flag("--plots", plots, "also write SVG plots");

    CLI::App* oracle = app.add_subcommand("oracle", "print the true arm-mean table");
    oracle->add_option("--config", config_path, "experiment config file")->required();
    oracle->add_option("--topology-seed", topology_seed, "topology seed")->required();

    CLI::App* replay = app.add_subcommand("replay", "reproduce a prior experiment");
    replay->add_option("--manifest", manifest_path, "manifest from a previous run")
        ->required();
    replay->add_option("--out", out_arg, "output directory");
    replay->add_option("--workers", workers, "parallel run workers");
    replay->add_flag("--plots", plots, "also write SVG plots");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(config_path, policy_arg, seed, seed_opt->count() > 0,
                                out_arg, workers, plots);
        if (oracle->parsed()) return cmd_oracle(config_path, topology_seed);
        if (replay->parsed()) return cmd_replay(manifest_path, out_arg, workers, plots);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
