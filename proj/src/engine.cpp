#include "ecoswitch/engine.hpp"

#include <algorithm>
#include <cmath>

#include "ecoswitch/errors.hpp"

namespace ecoswitch {

RunResult run_simulation(const ArrivalTrace& arrivals, ModelSource& source,
                         const std::vector<BaseRuleRow>& base_rules, const Policy& policy,
                         const EngineConfig& config) {
    if (arrivals.times.empty()) throw ConfigError("arrival trace is empty");
    const auto& ids = source.models();
    if (ids.size() != base_rules.size()) {
        throw ConfigError("base rules cover " + std::to_string(base_rules.size()) +
                          " models but the model source has " + std::to_string(ids.size()));
    }
    for (std::size_t j = 0; j < ids.size(); ++j) {
        if (base_rules[j].model != ids[j] || base_rules[j].model.name != ids[j].name) {
            throw ConfigError("base rule row " + std::to_string(j + 1) + " does not match model '" +
                              ids[j].name + "'");
        }
    }

    Controller controller(base_rules, policy, config.controller, find_model(ids, config.initial_model),
                          config.planner_seed, config.meter);

    RunResult result;
    result.approach = policy.name();
    result.base_rules = base_rules;
    result.b_initial = controller.state().runtime_rules;
    auto checkpoints = config.b_checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());
    std::size_t next_checkpoint = 0;

    RequestQueue queue(config.queue_capacity);
    const std::size_t n = arrivals.times.size();
    std::size_t next_arrival = 0;
    double free_at = 0.0;
    double last_tick_second = -1.0;

    auto admit = [&](std::size_t index) {
        ++result.enqueued;
        queue.enqueue(static_cast<std::uint64_t>(index + 1));
    };

    while (next_arrival < n || !queue.empty()) {
        if (queue.empty()) admit(next_arrival++);
        const std::uint64_t id = *queue.dequeue();
        const double arrival = arrivals.times[id - 1];

        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= id) {
            result.b_checkpoints.push_back({checkpoints[next_checkpoint++], controller.state().runtime_rules});
        }

        const ModelId active = controller.current_model();
        const InferenceSample sample = source.infer(active, id);
        const double start = std::max(free_at, arrival);
        const double completion = start + sample.proc_time;

        // Requests arriving while this one is in service wait in the queue.
        while (next_arrival < n && arrivals.times[next_arrival] <= completion) admit(next_arrival++);

        RequestLogEntry entry;
        entry.request_id = id;
        entry.arrival_time = arrival;
        entry.model = active;
        entry.energy = sample.energy;
        entry.confidence = sample.confidence;
        entry.model_proc_time = sample.proc_time;
        entry.system_proc_time = std::max(completion - arrival, sample.proc_time);
        entry.detections = sample.detections;
        controller.monitor_step(entry);
        free_at = completion;

        bool tick = config.cadence == Cadence::per_request;
        if (config.cadence == Cadence::per_second) {
            const double second = std::floor(completion);
            if (second > last_tick_second) {
                last_tick_second = second;
                tick = true;
            }
        }
        if (!tick) continue;

        const Action action = controller.analyzer_tick();
        if (action.reason == Reason::not_triggered) continue;
        const ModelId from = controller.current_model();
        if (controller.execute(action)) {
            result.timeline.push_back({controller.state().ticks, completion, from,
                                       controller.current_model(), action.reason});
        }
    }
    while (next_checkpoint < checkpoints.size()) {
        result.b_checkpoints.push_back({checkpoints[next_checkpoint++], controller.state().runtime_rules});
    }

    const auto& state = controller.state();
    result.log = controller.log();
    result.phase_energy = state.phase_energy;
    result.switch_count = state.switch_count;
    result.b_final = state.runtime_rules;
    result.ticks = state.ticks;
    result.triggers = state.triggers;
    result.wraps = source.wraps();
    result.drops = queue.drops();
    return result;
}

}  // namespace ecoswitch
