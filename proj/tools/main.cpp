#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcosim/harness.hpp"

using namespace dcosim;

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"Decentralized composite optimization simulator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Execute one experiment config");
    run_cmd->add_option("config", config_path, "JSON config file")->required();

    std::string sweep_axis;
    std::vector<std::string> sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid over one config key");
    sweep_cmd->add_option("config", config_path, "JSON config file")->required();
    sweep_cmd->add_option("--axis", sweep_axis, "dotted key, e.g. algorithm.eta")->required();
    sweep_cmd->add_option("--values", sweep_values, "values for the axis")->required();

    std::vector<std::string> compare_paths;
    std::string align = "iterations";
    auto* compare_cmd = app.add_subcommand("compare", "Align runs on a budget axis");
    compare_cmd->add_option("configs", compare_paths, "JSON config files")->required();
    compare_cmd->add_option("--align", align, "iterations | bits | grad_evals");

    int trials = 2000, reps = 50;
    auto* est_cmd = app.add_subcommand("estimate-c", "Empirical compressor noise-to-signal");
    est_cmd->add_option("config", config_path, "JSON config file")->required();
    est_cmd->add_option("--trials", trials, "sampled vectors (>= 1000)");
    est_cmd->add_option("--reps", reps, "compressions per vector");

    auto* ref_cmd = app.add_subcommand("reference", "Solve and cache the reference solution");
    ref_cmd->add_option("config", config_path, "JSON config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    if (run_cmd->parsed()) {
        const auto cfg = ExperimentConfig::from_file(config_path);
        const auto out = run_experiment(cfg);
        for (const auto& f : out.replica_files) std::cout << f << "\n";
        if (!out.aggregate_file.empty()) std::cout << out.aggregate_file << "\n";
    } else if (sweep_cmd->parsed()) {
        const auto cfg = ExperimentConfig::from_file(config_path);
        for (const auto& out : sweep_experiment(cfg, sweep_axis, sweep_values))
            for (const auto& f : out.replica_files) std::cout << f << "\n";
    } else if (compare_cmd->parsed()) {
        std::vector<ExperimentConfig> cfgs;
        for (const auto& p : compare_paths) cfgs.push_back(ExperimentConfig::from_file(p));
        std::cout << compare_experiments(cfgs, align) << "\n";
    } else if (est_cmd->parsed()) {
        const auto cfg = ExperimentConfig::from_file(config_path);
        const auto est = run_estimate_c(cfg, trials, reps);
        std::printf("c_hat,bias\n%.17g,%.17g\n", est.c_hat, est.max_bias);
    } else if (ref_cmd->parsed()) {
        const auto cfg = ExperimentConfig::from_file(config_path);
        std::string path;
        const auto ref = reference_for(cfg, true, &path);
        std::printf("cached,%s\nobj_star,%.17g\ntol,%.17g\n", path.c_str(), ref.obj_star,
                    ref.tol);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const divergence_error& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
