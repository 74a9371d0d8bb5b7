// fplsim: batch experiment runner for the perturbed-leader library.
//
//   fplsim run --config experiment.ini [--output-dir DIR] [--seed N]
//              [--replicas N] [--threads N]
//   fplsim run --scenario NAME [--output-dir DIR] [--seed N] [--replicas N]
//   fplsim list-scenarios
//
// Exit status is 0 iff every requested verdict passed. On failure the
// failing theorem/scenario names are printed as a JSON list on stdout.
// FPLSIM_OUTPUT_DIR sets the default output directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpl/experiment.hpp"
#include "fpl/scenarios.hpp"

namespace {

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("FPLSIM_OUTPUT_DIR")) return env;
    return ".";
}

int run_config(const std::filesystem::path& config_path, const std::filesystem::path& output_dir,
               std::uint64_t seed, int replicas, int threads) {
    fpl::ExperimentConfig config = fpl::load_experiment_config(config_path);
    if (seed != 0) config.seed = seed;
    if (replicas > 0) config.replicas = replicas;
    if (threads > 0) config.threads = threads;

    const fpl::ExperimentResult result = fpl::run_experiment(config, output_dir);
    std::cout << "report: " << result.report_path.string() << "\n";
    if (!result.trace_path.empty()) std::cout << "trace: " << result.trace_path.string() << "\n";
    for (const auto& report : result.reports) {
        std::cout << (report.pass ? "pass" : "FAIL") << "  " << report.theorem
                  << "  slack=" << report.slack << "\n";
    }
    if (!result.pass) {
        std::cout << nlohmann::json(result.failed).dump() << "\n";
        return 1;
    }
    return 0;
}

int run_scenario(const std::string& name, const std::filesystem::path& output_dir,
                 std::uint64_t seed, int replicas, int threads) {
    const fpl::Scenario* scenario = fpl::find_scenario(name);
    if (scenario == nullptr) {
        std::cerr << "unknown scenario '" << name << "'; see `fplsim list-scenarios`\n";
        return 2;
    }
    fpl::ScenarioOptions options;
    options.seed = seed;
    options.replicas = replicas;
    options.threads = threads;
    const fpl::ScenarioResult result = scenario->run(options);

    std::filesystem::create_directories(output_dir);
    const std::filesystem::path report_path = output_dir / (result.name + ".json");
    {
        std::ofstream out(report_path);
        out << fpl::render_scenario_json(result, scenario->claim);
    }
    std::cout << (result.pass ? "pass" : "FAIL") << "  " << result.name << "\n"
              << "  " << result.summary << "\n"
              << "report: " << report_path.string() << "\n";
    if (!result.pass) {
        std::cout << nlohmann::json({result.name}).dump() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"follow-the-perturbed-leader experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scenario_name;
    std::string output_dir = default_output_dir().string();
    std::uint64_t seed = 0;
    int replicas = 0;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment config or a named scenario");
    CLI::Option* config_opt = run->add_option("--config", config_path, "experiment config file");
    CLI::Option* scenario_opt =
        run->add_option("--scenario", scenario_name, "built-in scenario name");
    config_opt->excludes(scenario_opt);
    run->add_option("--output-dir", output_dir, "directory for reports and traces");
    run->add_option("--seed", seed, "master seed override (nonzero)");
    run->add_option("--replicas", replicas, "replica count override");
    run->add_option("--threads", threads, "worker thread count (default: hardware)");

    CLI::App* list = app.add_subcommand("list-scenarios", "print the built-in scenario catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const fpl::Scenario& s : fpl::scenario_catalog()) {
                std::cout << s.name << "\n    " << s.claim << "\n";
            }
            return 0;
        }
        if (!config_path.empty()) {
            return run_config(config_path, output_dir, seed, replicas, threads);
        }
        if (!scenario_name.empty()) {
            return run_scenario(scenario_name, output_dir, seed, replicas, threads);
        }
        std::cerr << "run: need --config or --scenario\n";
        return 2;
    } catch (const fpl::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
