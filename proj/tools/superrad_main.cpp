#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "superrad/error.hpp"
#include "superrad/oracle.hpp"
#include "superrad/scenario.hpp"

namespace {

namespace cli = superrad::cli;

enum ExitCode { ok = 0, failure = 1, config_error = 2, integration_error = 3 };

int print_battery(std::uint64_t seed) {
    auto report = superrad::oracle::run_identity_battery(seed);
    std::printf("seed %llu\n", static_cast<unsigned long long>(report.seed));
    for (const auto& r : report.identities)
        std::printf("%-16s samples=%zu max_residual=%.3e\n", r.name.c_str(), r.samples, r.max_residual);
    std::printf("%-16s max_residual=%.3e\n", "collision.comm", report.collision_commutator_residual);
    const bool pass = report.passed();
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? ok : failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective neutrino-emission decay models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string figure_name;

    auto* run_cmd = app.add_subcommand("run", "Integrate one scenario and write CSV + JSON");
    run_cmd->add_option("--config", config_path, "Scenario config file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory");

    auto* fig_cmd = app.add_subcommand("figure", "Emit the data behind one figure");
    fig_cmd->add_option("name", figure_name, "fig1, fig2, fig3 or figfb")->required();
    fig_cmd->add_option("--out", out_dir, "Output directory");
    fig_cmd->add_option("--jobs", jobs, "Worker threads");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over sweep.param/sweep.values");
    sweep_cmd->add_option("--config", config_path, "Scenario config file")->required();
    sweep_cmd->add_option("--out", out_dir, "Output directory");
    sweep_cmd->add_option("--jobs", jobs, "Worker threads");

    auto* oracle_cmd = app.add_subcommand("oracle-check", "Run the exact equation-of-motion identity battery");
    oracle_cmd->add_option("--seed", seed, "Seed for the random density matrices");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto out = cli::run(cli::load_config(config_path), out_dir);
            std::cout << out.csv.string() << '\n' << out.metadata.string() << '\n';
        } else if (fig_cmd->parsed()) {
            auto f = cli::parse_figure(figure_name);
            if (!f) throw superrad::ConfigInvalid("figure", "unknown figure '" + figure_name + "'");
            for (const auto& r : cli::reproduce_figure(*f, out_dir, jobs)) std::cout << r.csv.string() << '\n';
        } else if (sweep_cmd->parsed()) {
            auto out = cli::sweep(cli::load_config(config_path), out_dir, jobs);
            for (const auto& r : out.runs) std::cout << r.csv.string() << '\n';
            std::cout << out.summary_csv.string() << '\n';
        } else if (oracle_cmd->parsed()) {
            return print_battery(seed);
        }
    } catch (const superrad::ConfigInvalid& e) {
        std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
        return config_error;
    } catch (const superrad::Error& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return integration_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
