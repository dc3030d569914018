#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlmc/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"certify, solve, and simulate nonlinear Markov chains with an aggregator"};
    app.name("nlmc");

    std::string command;
    std::string scenario_path;
    nlmc::RunOptions options;
    double grid_step = 0.0;
    double tol = 0.0;
    std::size_t steps = 0;
    std::uint64_t seed = 0;

    app.add_option("command", command, "one of: certify, solve, simulate, queue, nleq")
        ->required();
    app.add_option("--scenario", scenario_path, "path to the scenario JSON file")->required();
    app.add_option("--out", options.out_dir, "directory for report files (default: .)");
    auto* grid_opt = app.add_option("--grid-step", grid_step,
                                    "aggregator scan step (default: interval width / 1000)");
    auto* tol_opt = app.add_option("--tol", tol, "root and residual tolerance");
    auto* steps_opt = app.add_option("--steps", steps, "simulation steps");
    auto* seed_opt = app.add_option("--seed", seed, "seed for sampled certificates");
    app.add_flag("--require-certified", options.require_certified,
                 "exit with code 2 when a uniqueness certificate fails");

    CLI11_PARSE(app, argc, argv);

    try {
        const nlmc::Command cmd = nlmc::parse_command(command);
        const nlmc::Scenario scenario = nlmc::load_scenario(scenario_path);
        if (grid_opt->count() > 0) options.grid_step = grid_step;
        if (tol_opt->count() > 0) options.tol = tol;
        if (steps_opt->count() > 0) options.steps = steps;
        if (seed_opt->count() > 0) options.seed = seed;
        return nlmc::run(cmd, scenario, options, std::cout);
    } catch (const nlmc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
