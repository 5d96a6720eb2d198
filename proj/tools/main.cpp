#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hnkdv/config.hpp"
#include "hnkdv/errors.hpp"
#include "hnkdv/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral steering experiments for higher-order KdV-type "
                 "equations on the torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int workers = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "experiment configuration file");
    app.add_option("--output", output_dir, "output directory (overrides config)");
    app.add_option("--workers", workers, "threads for parallel operator assembly")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "progress logging on stderr");

    auto* c_sim =
        app.add_subcommand("simulate", "free evolution; writes norm and mode tables");
    auto* c_sat = app.add_subcommand(
        "saturation", "iterated frequency-bracket coverage report");
    auto* c_a1 = app.add_subcommand(
        "check-a1", "admissibility report for the reference trajectory");
    auto* c_gram = app.add_subcommand(
        "gramian", "operator assembly, spectrum, and regularization ladder");
    auto* c_conv = app.add_subcommand(
        "converge-tau", "steering residuals along the time-rescaling ladder");
    auto* c_fix = app.add_subcommand(
        "fixed-time", "steer to the target at a fixed total horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        hnkdv::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = hnkdv::load_config(config_path);
        } else {
            cfg.validate();
        }
        hnkdv::RunOptions opts{output_dir, workers, verbose};
        if (c_sim->parsed()) hnkdv::cmd_simulate(cfg, opts);
        else if (c_sat->parsed()) hnkdv::cmd_saturation(cfg, opts);
        else if (c_a1->parsed()) hnkdv::cmd_check_a1(cfg, opts);
        else if (c_gram->parsed()) hnkdv::cmd_gramian(cfg, opts);
        else if (c_conv->parsed()) hnkdv::cmd_converge_tau(cfg, opts);
        else if (c_fix->parsed()) hnkdv::cmd_fixed_time(cfg, opts);
        return 0;
    } catch (const hnkdv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hnkdv::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
