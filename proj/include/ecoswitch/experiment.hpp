#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecoswitch/engine.hpp"
#include "ecoswitch/learning_engine.hpp"
#include "ecoswitch/model_sim.hpp"
#include "ecoswitch/report.hpp"

namespace ecoswitch {

/// Everything one experiment needs. Loaded from a `key = value` file; see config_help().
struct ExperimentConfig {
    std::optional<std::filesystem::path> profiles;      // calibrated reference models when empty
    SigmaPolicy sigma;                                  // spread of the calibrated reference models
    std::optional<std::filesystem::path> metric_trace;  // replaces profile sampling when set
    std::optional<std::filesystem::path> arrivals;      // synthetic Poisson arrivals when empty
    std::size_t requests = 25000;
    double rate = 5.0;
    std::optional<std::size_t> queue_capacity;
    std::size_t eval_requests = 500;
    std::optional<std::filesystem::path> base_rules;    // matrix A CSV; learned inline when empty
    std::size_t k = 10;
    double epsilon = 0.1;
    std::string policy = "ecomls";
    std::vector<double> epsilons{0.1, 0.2, 0.3, 0.4};
    Cadence cadence = Cadence::per_request;
    TriggerSource trigger = TriggerSource::window;
    bool window_reset = false;  // clear the monitor window after each switch
    std::string initial_model = "1";
    std::uint64_t seed = 42;
    std::filesystem::path out = "out";
    PhaseCosts costs;
    double meter_watts = 0.0;  // > 0 switches to wall-clock metering
    std::uint64_t drift_at = 0;
    std::optional<std::filesystem::path> drift_profiles;

    /// Checks ranges and that every referenced file exists. Throws ConfigError / IoError.
    void validate() const;
};

/// Parses a config file. Relative paths inside it resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Human-readable list of config keys and their defaults.
std::string config_help();

/// Directory-safe form of an approach label.
std::string approach_slug(const std::string& approach);

std::vector<ModelProfile> resolve_profiles(const ExperimentConfig& config);

/// Runs the learning engine and writes P_<model>.csv, A.csv and profiles.ini under `<out>/learn`.
LearningResult cmd_learn(const ExperimentConfig& config);

struct ApproachRun {
    RunReport report;
    RunResult result;
};

/// Runs one policy (config.policy / config.epsilon) and writes its artifacts under `<out>/<slug>`.
ApproachRun cmd_run(const ExperimentConfig& config);

/// One EcoMLS run per epsilon plus `<out>/sweep_summary.csv`. Throws ConfigError on an empty list.
std::vector<RunReport> cmd_sweep(const ExperimentConfig& config, const std::vector<double>& epsilons);

/// Every no-switch model, each sweep epsilon, and naive1..3 on one workload.
/// Writes `<out>/compare_summary.csv`, `<out>/compare_histogram.csv` and per-approach artifacts.
std::vector<RunReport> cmd_compare(const ExperimentConfig& config);

/// Lower-level helpers shared with tests.
struct PreparedExperiment {
    std::vector<ModelProfile> profiles;
    std::vector<ModelId> models;
    std::vector<BaseRuleRow> base_rules;
    ArrivalTrace arrivals;
    std::optional<MetricTrace> trace;
    std::optional<ProfileDrift> drift;
};

PreparedExperiment prepare(const ExperimentConfig& config);
ApproachRun run_approach(const ExperimentConfig& config, const PreparedExperiment& prepared,
                         const Policy& policy);
void write_run_artifacts(const std::filesystem::path& dir, const ApproachRun& run,
                         const ReferenceLine& line);

}  // namespace ecoswitch
