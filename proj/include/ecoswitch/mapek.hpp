#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecoswitch/knowledge.hpp"
#include "ecoswitch/seeds.hpp"
#include "ecoswitch/types.hpp"

namespace ecoswitch {

// Rule-row helpers

/// Energy reference of a rule row: midpoint of e_min and e_max.
inline double e_avg(const BaseRuleRow& row) { return row.e_avg(); }
inline double e_avg(const RuntimeRuleRow& row) { return row.e_avg(); }

/// Planner score for a B row: min(e_avg, e_latest) * (1 - c_avg).
double planner_score(const RuntimeRuleRow& row);

/// True when the monitored score strictly exceeds the row's threshold score.
bool needs_adaptation(double e_bar, double c_bar, const RuntimeRuleRow& row);

// Actions

enum class Reason {
    not_triggered,
    explore,
    energy_branch,
    confidence_branch,
};

const char* to_string(Reason reason);

/// Planner output: NoAdapt (code -1) or Switch(target).
struct Action {
    std::optional<ModelId> target;
    Reason reason = Reason::not_triggered;
    bool no_candidates = false;  // exploitation found an empty candidate set

    static Action no_adapt(Reason reason = Reason::not_triggered) { return {std::nullopt, reason, false}; }
    static Action switch_to(ModelId target, Reason reason) { return {std::move(target), reason, false}; }

    bool is_switch() const { return target.has_value(); }
    int code() const { return target ? target->index : -1; }
};

struct PlannerConfig {
    double epsilon = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// One planner decision over a B snapshot.
///
/// Draws p ~ U[0,1). Below epsilon a uniformly random model is chosen. Otherwise
/// every row is scored with planner_score and, depending on whether e_bar exceeds
/// the current row's e_avg, the minimum is taken over rows with e_avg < e_bar
/// (energy branch) or over rows with c_avg > c_bar (confidence branch). Ties go to
/// the lowest index. Picking the current model, or an empty candidate set, is NoAdapt.
Action plan(std::span<const RuntimeRuleRow> rules, const ModelId& current, double e_bar, double c_bar,
            double epsilon, SplitMix64& rng);

/// The exploitation half of plan, without a random draw.
Action exploit(std::span<const RuntimeRuleRow> rules, const ModelId& current, double e_bar, double c_bar);

// Policies

enum class PolicyKind { no_switch, naive1, naive2, naive3, ecomls };

/// How much of B the analyzer refreshes each tick.
enum class KnowledgeUpdate { frozen, confidence_only, full };

struct Policy {
    PolicyKind kind = PolicyKind::ecomls;
    std::optional<ModelId> fixed_model;  // no_switch only
    double epsilon = 0.0;

    bool adapts() const { return kind != PolicyKind::no_switch; }
    KnowledgeUpdate updates() const;
    /// Approach label used in reports: model name, naive1..3, or ecomls_eps<epsilon>.
    std::string name() const;
};

/// Builds a policy from a name: a model name or `no_switch:<model>`, `naive1`, `naive2`,
/// `naive3`, `ecomls` (uses `epsilon`) or `ecomls:<eps>`. Throws ConfigError otherwise.
Policy baseline_policy(const std::string& kind, const std::vector<ModelId>& models, double epsilon = 0.1);

// Phase energy accounting

enum class Phase { monitor, analyzer, planner, executor };

struct PhaseEnergy {
    double monitor = 0.0;
    double analyzer = 0.0;
    double planner = 0.0;
    double executor = 0.0;

    double total() const { return monitor + analyzer + planner + executor; }
    double& operator[](Phase phase);
};

/// Joules charged per stage invocation.
struct PhaseCosts {
    double monitor = 1.25;
    double analyzer = 0.001;
    double planner = 0.002;
    double executor = 0.0005;

    void validate() const;
};

/// Converts one stage invocation into joules.
class EnergyMeter {
public:
    virtual ~EnergyMeter() = default;
    /// When true the controller measures wall-clock time around each stage.
    virtual bool timed() const { return false; }
    virtual double joules(Phase phase, std::chrono::nanoseconds elapsed) const = 0;
};

/// Fixed synthetic cost per invocation; fully deterministic.
class SyntheticMeter final : public EnergyMeter {
public:
    explicit SyntheticMeter(PhaseCosts costs = {});
    double joules(Phase phase, std::chrono::nanoseconds elapsed) const override;

private:
    PhaseCosts costs_;
};

/// Elapsed wall-clock time times a constant power draw. Not reproducible across runs.
class WallClockMeter final : public EnergyMeter {
public:
    explicit WallClockMeter(double watts);
    bool timed() const override { return true; }
    double joules(Phase phase, std::chrono::nanoseconds elapsed) const override;

private:
    double watts_;
};

// Controller

enum class TriggerSource { window, latest };

struct ControllerConfig {
    std::size_t k = 10;
    TriggerSource trigger_source = TriggerSource::window;
    bool clear_window_on_switch = false;  // restart the monitor window for each newly active model

    void validate() const;
};

struct ControllerState {
    ModelId current_model;
    SlidingWindow monitor_window{1};
    std::vector<RuntimeRuleRow> runtime_rules;
    std::uint64_t switch_count = 0;
    PhaseEnergy phase_energy;
    std::uint64_t ticks = 0;
    std::uint64_t triggers = 0;
};

/// Monitor, Analyzer, Planner and Executor over shared Knowledge for one engine.
///
/// Not thread-safe; one instance belongs to one simulation and may be moved between threads.
class Controller {
public:
    Controller(std::vector<BaseRuleRow> base_rules, Policy policy, ControllerConfig config,
               ModelId initial_model, std::uint64_t planner_seed,
               std::shared_ptr<const EnergyMeter> meter = nullptr);

    /// Appends the entry to the Log Repository and buffers its metrics in the window.
    void monitor_step(const RequestLogEntry& entry);

    /// Snapshot B, refresh B from new observations, test the trigger on the snapshot and
    /// plan when triggered. Returns NoAdapt (Reason::not_triggered) when nothing fires.
    Action analyzer_tick();

    /// Applies an action; returns true when the active model changed.
    bool execute(const Action& action);

    const ModelId& current_model() const { return state_.current_model; }
    const ControllerState& state() const { return state_; }
    const LogRepository& log() const { return log_; }
    const std::vector<BaseRuleRow>& base_rules() const { return base_rules_; }
    const Policy& policy() const { return policy_; }
    const ControllerConfig& config() const { return config_; }

private:
    template <class F>
    auto charged(Phase phase, F&& body);

    std::vector<BaseRuleRow> base_rules_;
    Policy policy_;
    ControllerConfig config_;
    std::shared_ptr<const EnergyMeter> meter_;
    SplitMix64 rng_;
    ControllerState state_;
    LogRepository log_;
    struct Observation {
        double energy;
        double confidence;
    };
    std::vector<Observation> pending_;  // current-model metrics not yet folded into B
};

}  // namespace ecoswitch
