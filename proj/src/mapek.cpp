#include "ecoswitch/mapek.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"

namespace ecoswitch {

double planner_score(const RuntimeRuleRow& row) {
    return std::min(row.e_avg(), row.e_latest) * (1.0 - row.c_avg);
}

bool needs_adaptation(double e_bar, double c_bar, const RuntimeRuleRow& row) {
    return compute_score(e_bar, c_bar) > compute_score(row.e_avg(), row.c_avg);
}

const char* to_string(Reason reason) {
    switch (reason) {
        case Reason::not_triggered: return "not_triggered";
        case Reason::explore: return "explore";
        case Reason::energy_branch: return "energy_branch";
        case Reason::confidence_branch: return "confidence_branch";
    }
    return "unknown";
}

void PlannerConfig::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw ConfigError("epsilon must lie in [0,1], got " + std::to_string(epsilon));
    }
}

// Planner

Action exploit(std::span<const RuntimeRuleRow> rules, const ModelId& current, double e_bar, double c_bar) {
    if (current.index < 1 || current.slot() >= rules.size()) {
        throw ValidationError("current model '" + current.name + "' has no rule row");
    }
    const bool energy_branch = e_bar > rules[current.slot()].e_avg();
    const Reason reason = energy_branch ? Reason::energy_branch : Reason::confidence_branch;

    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const bool candidate = energy_branch ? rules[i].e_avg() < e_bar : rules[i].c_avg > c_bar;
        if (!candidate) continue;
        const double score = planner_score(rules[i]);
        if (!best || score < best_score) {
            best = i;
            best_score = score;
        }
    }
    if (!best) {
        Action a = Action::no_adapt(reason);
        a.no_candidates = true;
        return a;
    }
    if (*best == current.slot()) return Action::no_adapt(reason);
    return Action::switch_to(rules[*best].model, reason);
}

Action plan(std::span<const RuntimeRuleRow> rules, const ModelId& current, double e_bar, double c_bar,
            double epsilon, SplitMix64& rng) {
    if (rules.empty()) throw ValidationError("planner needs at least one rule row");
    const double p = rng.uniform01();
    if (p < epsilon) {
        const auto n = rules.size();
        const auto pick = std::min(n - 1, static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n)));
        if (rules[pick].model == current) return Action::no_adapt(Reason::explore);
        return Action::switch_to(rules[pick].model, Reason::explore);
    }
    return exploit(rules, current, e_bar, c_bar);
}

// Policies

KnowledgeUpdate Policy::updates() const {
    switch (kind) {
        case PolicyKind::no_switch:
        case PolicyKind::naive1: return KnowledgeUpdate::frozen;
        case PolicyKind::naive2: return KnowledgeUpdate::confidence_only;
        case PolicyKind::naive3:
        case PolicyKind::ecomls: return KnowledgeUpdate::full;
    }
    return KnowledgeUpdate::frozen;
}

std::string Policy::name() const {
    switch (kind) {
        case PolicyKind::no_switch: return fixed_model ? fixed_model->name : "no_switch";
        case PolicyKind::naive1: return "naive1";
        case PolicyKind::naive2: return "naive2";
        case PolicyKind::naive3: return "naive3";
        case PolicyKind::ecomls: return "ecomls_eps" + csv::num(epsilon);
    }
    return "unknown";
}

Policy baseline_policy(const std::string& kind, const std::vector<ModelId>& models, double epsilon) {
    auto colon = kind.find(':');
    const std::string head = kind.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : kind.substr(colon + 1);

    Policy p;
    if (head == "naive1" || head == "naive2" || head == "naive3") {
        if (!arg.empty()) throw ConfigError("policy '" + head + "' takes no argument");
        p.kind = head == "naive1" ? PolicyKind::naive1
               : head == "naive2" ? PolicyKind::naive2
                                  : PolicyKind::naive3;
        return p;
    }
    if (head == "ecomls") {
        p.kind = PolicyKind::ecomls;
        p.epsilon = epsilon;
        if (!arg.empty()) p.epsilon = csv::parse_double(arg, "policy", 1);
        PlannerConfig{p.epsilon, 0}.validate();
        return p;
    }
    if (head == "no_switch") {
        if (arg.empty()) throw ConfigError("no_switch needs a model, e.g. no_switch:nano");
        p.kind = PolicyKind::no_switch;
        p.fixed_model = find_model(models, arg);
        return p;
    }
    if (arg.empty()) {
        for (const auto& m : models) {
            if (m.name == head) {
                p.kind = PolicyKind::no_switch;
                p.fixed_model = m;
                return p;
            }
        }
    }
    throw ConfigError("unknown policy '" + kind + "'");
}

// Phase accounting

double& PhaseEnergy::operator[](Phase phase) {
    switch (phase) {
        case Phase::monitor: return monitor;
        case Phase::analyzer: return analyzer;
        case Phase::planner: return planner;
        case Phase::executor: return executor;
    }
    throw Error(ErrorCategory::internal, "bad phase");
}

void PhaseCosts::validate() const {
    if (monitor < 0.0 || analyzer < 0.0 || planner < 0.0 || executor < 0.0) {
        throw ConfigError("phase costs must be >= 0");
    }
}

SyntheticMeter::SyntheticMeter(PhaseCosts costs) : costs_(costs) { costs_.validate(); }

double SyntheticMeter::joules(Phase phase, std::chrono::nanoseconds) const {
    switch (phase) {
        case Phase::monitor: return costs_.monitor;
        case Phase::analyzer: return costs_.analyzer;
        case Phase::planner: return costs_.planner;
        case Phase::executor: return costs_.executor;
    }
    return 0.0;
}

WallClockMeter::WallClockMeter(double watts) : watts_(watts) {
    if (!(watts > 0.0) || !std::isfinite(watts)) throw ConfigError("meter power must be > 0 W");
}

double WallClockMeter::joules(Phase, std::chrono::nanoseconds elapsed) const {
    return watts_ * std::chrono::duration<double>(elapsed).count();
}

// Controller

void ControllerConfig::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
}

Controller::Controller(std::vector<BaseRuleRow> base_rules, Policy policy, ControllerConfig config,
                       ModelId initial_model, std::uint64_t planner_seed,
                       std::shared_ptr<const EnergyMeter> meter)
    : base_rules_(std::move(base_rules)),
      policy_(std::move(policy)),
      config_(config),
      meter_(meter ? std::move(meter) : std::make_shared<SyntheticMeter>()),
      rng_(planner_seed) {
    config_.validate();
    PlannerConfig{policy_.epsilon, planner_seed}.validate();
    std::vector<ModelId> ids;
    for (const auto& row : base_rules_) ids.push_back(row.model);
    validate_model_set(ids);
    if (policy_.kind == PolicyKind::no_switch) {
        if (!policy_.fixed_model) throw ConfigError("no_switch policy needs a model");
        initial_model = *policy_.fixed_model;
    }
    if (initial_model.index < 1 || initial_model.slot() >= ids.size()) {
        throw ConfigError("initial model '" + initial_model.name + "' is not in the model set");
    }
    state_.current_model = ids[initial_model.slot()];
    state_.monitor_window = SlidingWindow(config_.k);
    state_.runtime_rules = init_runtime_rules(base_rules_, config_.k);
}

template <class F>
auto Controller::charged(Phase phase, F&& body) {
    const bool timed = meter_->timed();
    const auto start = timed ? std::chrono::steady_clock::now() : std::chrono::steady_clock::time_point{};
    auto account = [&] {
        const auto elapsed = timed ? std::chrono::steady_clock::now() - start : std::chrono::nanoseconds{0};
        state_.phase_energy[phase] +=
            meter_->joules(phase, std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed));
    };
    if constexpr (std::is_void_v<decltype(body())>) {
        body();
        account();
    } else {
        auto result = body();
        account();
        return result;
    }
}

void Controller::monitor_step(const RequestLogEntry& entry) {
    if (entry.model != state_.current_model) {
        throw ValidationError("logged request ran on '" + entry.model.name + "' but '" +
                              state_.current_model.name + "' is active");
    }
    log_.log_request(entry);
    if (!policy_.adapts()) return;
    charged(Phase::monitor, [&] {
        state_.monitor_window.push(entry.energy, entry.confidence);
        pending_.push_back({entry.energy, entry.confidence});
    });
}

Action Controller::analyzer_tick() {
    if (!policy_.adapts()) return Action::no_adapt();

    struct Trigger {
        std::vector<RuntimeRuleRow> snapshot;
        WindowStats monitored;
    };
    auto trigger = charged(Phase::analyzer, [&]() -> std::optional<Trigger> {
        ++state_.ticks;
        if (state_.monitor_window.empty()) return std::nullopt;

        // The planner and trigger see B as it stood before this tick's refresh.
        Trigger t{state_.runtime_rules, {}};
        auto& row = state_.runtime_rules[state_.current_model.slot()];
        switch (policy_.updates()) {
            case KnowledgeUpdate::frozen: break;
            case KnowledgeUpdate::confidence_only:
                for (const auto& o : pending_) row = update_runtime_confidence(std::move(row), o.confidence);
                break;
            case KnowledgeUpdate::full:
                for (const auto& o : pending_) row = update_runtime_rules(std::move(row), o.energy, o.confidence);
                break;
        }
        pending_.clear();

        if (config_.trigger_source == TriggerSource::window) {
            t.monitored = window_stats(state_.monitor_window);
        } else {
            t.monitored = {state_.monitor_window.energies().latest(),
                           state_.monitor_window.confidences().latest()};
        }
        if (!needs_adaptation(t.monitored.e_bar, t.monitored.c_bar,
                              t.snapshot[state_.current_model.slot()])) {
            return std::nullopt;
        }
        ++state_.triggers;
        return t;
    });
    if (!trigger) return Action::no_adapt();
    return charged(Phase::planner, [&] {
        return plan(trigger->snapshot, state_.current_model, trigger->monitored.e_bar,
                    trigger->monitored.c_bar, policy_.epsilon, rng_);
    });
}

bool Controller::execute(const Action& action) {
    if (action.target && (action.target->index < 1 ||
                          action.target->slot() >= state_.runtime_rules.size())) {
        throw ValidationError("switch target '" + action.target->name + "' is not in the model set");
    }
    return charged(Phase::executor, [&] {
        if (!action.target || *action.target == state_.current_model) return false;
        if (!policy_.adapts()) throw ValidationError("no_switch policy cannot change models");
        state_.current_model = state_.runtime_rules[action.target->slot()].model;
        ++state_.switch_count;
        if (config_.clear_window_on_switch) state_.monitor_window.clear();
        return true;
    });
}

}  // namespace ecoswitch
