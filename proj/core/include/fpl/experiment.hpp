#pragma once
// Batch experiment front end: a versioned plain-text config format, pre-run
// hypothesis validation, and file emission (game traces as CSV, bound
// reports as JSON). The CLI is a thin shell over this module.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpl/harness.hpp"

namespace fpl {

inline constexpr const char* kConfigSchema = "fpl-experiment-v1";

struct PoolSpec {
    enum class Kind { kUniform, kCountable, kExplicit };
    Kind kind = Kind::kUniform;
    int n = 0;            // kUniform
    int cap = 0;          // kCountable
    bool finitized = false;
    std::vector<double> complexities;  // kExplicit

    ExpertPool build() const;
};

struct ExperimentConfig {
    PoolSpec pool;
    PredictorKind predictor = PredictorKind::kFpl;
    InnerScheduleKind hierarchy_inner = InnerScheduleKind::kDynamic;
    ScheduleSpec schedule;
    EnvironmentSpec environment;
    std::int64_t horizon = 0;
    int replicas = 1;
    std::uint64_t seed = 0;
    Regime regime = Regime::kFreshPerStep;
    RunMode mode = RunMode::kActual;
    bool ifpl_diagnostic = false;
    int threads = 0;
    std::vector<BoundId> theorems;
    bool write_trace = false;

    RunSpec to_run_spec() const;
};

// Parses the sectioned key=value format; error messages carry line numbers
// and field names. `origin` is used in diagnostics only.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Static hypothesis validation: every requested theorem must be satisfiable
// by the configured pool/schedule/predictor before anything runs.
void validate_experiment(const ExperimentConfig& config);

struct ExperimentResult {
    bool pass = false;
    std::vector<BoundReport> reports;
    std::vector<std::string> failed;              // theorem ids that failed
    std::filesystem::path report_path;
    std::filesystem::path trace_path;             // empty unless trace requested
};

// Runs the configured replicas, evaluates the requested bounds, writes
// report JSON (and the first replica's trace CSV when requested).
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& output_dir);

// File writers, exposed for reuse by the scenarios and the CLI.
void write_trace_csv(const GameTrace& trace, const std::filesystem::path& path);
std::string render_report_json(const ExperimentConfig& config,
                               const std::vector<BoundReport>& reports);

} // namespace fpl
