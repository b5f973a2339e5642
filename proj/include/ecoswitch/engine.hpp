#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ecoswitch/knowledge.hpp"
#include "ecoswitch/mapek.hpp"
#include "ecoswitch/model_sim.hpp"
#include "ecoswitch/workload.hpp"

namespace ecoswitch {

/// When the analyzer runs: after every processed request, or once per simulated second.
enum class Cadence { per_request, per_second };

struct EngineConfig {
    ControllerConfig controller;
    Cadence cadence = Cadence::per_request;
    std::optional<std::size_t> queue_capacity;  // unbounded when empty
    std::string initial_model = "1";            // name or index; ignored by no_switch
    std::uint64_t planner_seed = 0;
    std::shared_ptr<const EnergyMeter> meter;   // SyntheticMeter{} when null
    /// Request ids at which a copy of B is captured (before that request is processed).
    std::vector<std::uint64_t> b_checkpoints;
};

struct SwitchEvent {
    std::uint64_t tick = 0;
    double virtual_time = 0.0;
    ModelId from;
    ModelId to;
    Reason reason = Reason::explore;
};

struct BCheckpoint {
    std::uint64_t request_id = 0;
    std::vector<RuntimeRuleRow> rules;
};

struct RunResult {
    std::string approach;
    LogRepository log;
    PhaseEnergy phase_energy;
    std::uint64_t switch_count = 0;
    std::vector<SwitchEvent> timeline;
    std::vector<BaseRuleRow> base_rules;
    std::vector<RuntimeRuleRow> b_initial;
    std::vector<RuntimeRuleRow> b_final;
    std::vector<BCheckpoint> b_checkpoints;
    std::uint64_t ticks = 0;
    std::uint64_t triggers = 0;
    std::uint64_t wraps = 0;
    std::uint64_t drops = 0;
    std::uint64_t enqueued = 0;
};

/// Runs one policy over an arrival trace.
///
/// Processing is sequential on a virtual clock: a request starts at
/// max(arrival, previous completion) and completes after its model processing
/// time; its system time is completion minus arrival. Arrivals that find a
/// bounded queue full are dropped.
RunResult run_simulation(const ArrivalTrace& arrivals, ModelSource& source,
                         const std::vector<BaseRuleRow>& base_rules, const Policy& policy,
                         const EngineConfig& config);

}  // namespace ecoswitch
