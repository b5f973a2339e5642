#include "ecoswitch/experiment.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"
#include "ecoswitch/seeds.hpp"

namespace ecoswitch {

namespace fs = std::filesystem;

namespace {

void require_file(const std::optional<fs::path>& path, const char* key) {
    if (path && !fs::exists(*path)) throw IoError(path->string() + ": file named by '" + key + "' not found");
}

Cadence parse_cadence(const std::string& v) {
    if (v == "per_request") return Cadence::per_request;
    if (v == "per_second") return Cadence::per_second;
    throw ConfigError("cadence must be per_request or per_second, got '" + v + "'");
}

TriggerSource parse_trigger(const std::string& v) {
    if (v == "window") return TriggerSource::window;
    if (v == "latest") return TriggerSource::latest;
    throw ConfigError("trigger must be window or latest, got '" + v + "'");
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + " must be true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, const std::string& where) {
    std::vector<double> out;
    if (v.find_first_not_of(" \t") == std::string::npos) return out;
    for (const auto& f : csv::split(v)) out.push_back(csv::parse_double(f, where, 1));
    return out;
}

/// Per-model P_j built from a recorded metric trace, in trace order.
LearningResult learn_from_trace(const MetricTrace& trace, const std::vector<ModelId>& models) {
    LearningResult out;
    for (const auto& m : models) {
        PerformanceMatrix p{m, {}};
        std::uint64_t id = 0;
        for (const auto& r : trace.records) {
            if (r.model == m) p.rows.push_back({++id, r.energy, r.confidence, r.proc_time});
        }
        if (p.rows.empty()) throw ConfigError("metric trace has no records for model '" + m.name + "'");
        out.base_rules.push_back(aggregate_rules(p));
        out.matrices.push_back(std::move(p));
    }
    return out;
}

LearningResult run_learning(const ExperimentConfig& config, const std::vector<ModelProfile>& profiles,
                            const std::optional<MetricTrace>& trace) {
    if (trace) return learn_from_trace(*trace, model_ids(profiles));
    return learn(profiles, EvaluationDataset::sequential(config.eval_requests), sub_seed(config.seed, "learn"));
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    auto out = csv::open_output(path);
    writer(out);
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<ApproachRun> run_all(const ExperimentConfig& config, const PreparedExperiment& prepared,
                                 const std::vector<Policy>& policies) {
    // Each run owns its engine and model source; results merge in list order.
    std::vector<std::future<ApproachRun>> futures;
    futures.reserve(policies.size());
    for (const auto& p : policies) {
        futures.push_back(std::async(std::launch::async, [&config, &prepared, p] {
            return run_approach(config, prepared, p);
        }));
    }
    std::vector<ApproachRun> runs;
    runs.reserve(policies.size());
    for (auto& f : futures) runs.push_back(f.get());
    return runs;
}

ReferenceLine standalone_reference(const ExperimentConfig& config, const PreparedExperiment& prepared) {
    std::vector<Policy> standalone;
    for (const auto& m : prepared.models) standalone.push_back(Policy{PolicyKind::no_switch, m, 0.0});
    std::vector<RunReport> reports;
    for (auto& run : run_all(config, prepared, standalone)) reports.push_back(std::move(run.report));
    return reference_line(reports);
}

}  // namespace

// Config

void ExperimentConfig::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    PlannerConfig{epsilon, 0}.validate();
    for (double e : epsilons) PlannerConfig{e, 0}.validate();
    if (requests < 1) throw ConfigError("requests must be >= 1");
    if (!(rate > 0.0)) throw ConfigError("rate must be > 0");
    if (eval_requests < 1) throw ConfigError("eval_requests must be >= 1");
    if (queue_capacity && *queue_capacity < 1) throw ConfigError("queue_capacity must be >= 1");
    if (meter_watts < 0.0) throw ConfigError("meter_watts must be >= 0");
    if (drift_profiles && drift_at < 1) throw ConfigError("drift_at must be >= 1 when drift_profiles is set");
    costs.validate();
    require_file(profiles, "profiles");
    require_file(metric_trace, "metric_trace");
    require_file(arrivals, "arrivals");
    require_file(base_rules, "base_rules");
    require_file(drift_profiles, "drift_profiles");
}

ExperimentConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw IoError(path.string() + ": config file not found");
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(path.string(), e.line(), e.message());
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    auto resolve = [&](const std::string& v) {
        fs::path p(v);
        return p.is_absolute() ? p : base / p;
    };

    ExperimentConfig c;
    const std::string where = path.string();
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ConfigError(where + ": sections are not supported ('" + key + "')");
        const std::string v = node.get_value<std::string>();
        auto number = [&] { return csv::parse_double(v, where + " key " + key, 1); };
        auto count = [&] {
            const auto n = csv::parse_int(v, where + " key " + key, 1);
            if (n < 0) throw ConfigError(where + ": '" + key + "' must be >= 0");
            return static_cast<std::size_t>(n);
        };
        if (key == "profiles") c.profiles = resolve(v);
        else if (key == "sigma_c") c.sigma.conf_sigma = number();
        else if (key == "sigma_e_rel") c.sigma.energy_rel_sigma = number();
        else if (key == "watts") c.sigma.watts = number();
        else if (key == "metric_trace") c.metric_trace = resolve(v);
        else if (key == "arrivals") c.arrivals = resolve(v);
        else if (key == "requests") c.requests = count();
        else if (key == "rate") c.rate = number();
        else if (key == "queue_capacity") {
            const auto n = count();
            c.queue_capacity = n == 0 ? std::nullopt : std::optional<std::size_t>(n);
        }
        else if (key == "eval_requests") c.eval_requests = count();
        else if (key == "base_rules") c.base_rules = resolve(v);
        else if (key == "k") c.k = count();
        else if (key == "epsilon") c.epsilon = number();
        else if (key == "policy") c.policy = v;
        else if (key == "epsilons") c.epsilons = parse_list(v, where + " key epsilons");
        else if (key == "cadence") c.cadence = parse_cadence(v);
        else if (key == "trigger") c.trigger = parse_trigger(v);
        else if (key == "window_reset") c.window_reset = parse_bool(v, key);
        else if (key == "initial_model") c.initial_model = v;
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(csv::parse_int(v, where + " key seed", 1));
        else if (key == "out") c.out = resolve(v);
        else if (key == "cost_monitor") c.costs.monitor = number();
        else if (key == "cost_analyzer") c.costs.analyzer = number();
        else if (key == "cost_planner") c.costs.planner = number();
        else if (key == "cost_executor") c.costs.executor = number();
        else if (key == "meter_watts") c.meter_watts = number();
        else if (key == "drift_at") c.drift_at = count();
        else if (key == "drift_profiles") c.drift_profiles = resolve(v);
        else throw ConfigError(where + ": unknown key '" + key + "'");
    }
    return c;
}

std::string config_help() {
    return R"(Config file keys (key = value, '#' or ';' comments):
  profiles        model profile file (INI sections)      default: calibrated reference models
  sigma_c         confidence spread of reference models  default: 0.12
  sigma_e_rel     energy spread / mean, reference models default: 0.25
  watts           reference power; mean time = E / watts default: 50
  metric_trace    CSV model,energy_j,confidence,proc_time_s,detections (replay instead of sampling)
  arrivals        arrival trace, one timestamp per line  default: synthetic Poisson
  requests        synthetic request count                default: 25000
  rate            synthetic arrival rate (req/s)         default: 5
  queue_capacity  bounded FIFO size, 0 = unbounded       default: 0
  eval_requests   learning-engine dataset size           default: 500
  base_rules      matrix A CSV                           default: learned inline
  k               monitor / runtime window length        default: 10
  epsilon         exploration rate for ecomls            default: 0.1
  policy          nano|small|...|no_switch:<m>|naive1|naive2|naive3|ecomls[:eps]  default: ecomls
  epsilons        sweep / compare list                   default: 0.1,0.2,0.3,0.4
  cadence         per_request | per_second               default: per_request
  trigger         window | latest                        default: window
  window_reset    true clears the monitor window on every switch  default: false
  initial_model   name or index                          default: 1
  seed            base seed                              default: 42
  out             output directory                       default: out
  cost_monitor, cost_analyzer, cost_planner, cost_executor
                  joules per stage invocation            default: 1.25, 0.001, 0.002, 0.0005
  meter_watts     > 0 meters controller stages by wall-clock time instead (not reproducible)
  drift_at        request id where drift_profiles take over
  drift_profiles  profile file used from drift_at onward
Seeds: each component draws from mix64(seed ^ mix64(fnv1a(tag))) with tags
  learn, arrivals, models and planner/<approach>.
)";
}

std::string approach_slug(const std::string& approach) {
    std::string s = approach;
    for (auto& ch : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-';
        if (!ok) ch = '_';
    }
    return s;
}

std::vector<ModelProfile> resolve_profiles(const ExperimentConfig& config) {
    if (config.profiles) return load_profiles(*config.profiles);
    return calibrate_profiles(reference_targets(), config.sigma);
}

PreparedExperiment prepare(const ExperimentConfig& config) {
    config.validate();
    PreparedExperiment p;
    p.profiles = resolve_profiles(config);
    p.models = model_ids(p.profiles);
    if (config.metric_trace) p.trace = load_metric_trace(*config.metric_trace, p.models);
    if (config.drift_profiles) {
        p.drift = ProfileDrift{config.drift_at, load_profiles(*config.drift_profiles)};
    }
    if (config.base_rules) {
        p.base_rules = read_base_rules_csv(*config.base_rules, p.models);
    } else {
        p.base_rules = run_learning(config, p.profiles, p.trace).base_rules;
    }
    p.arrivals = config.arrivals ? load_arrival_trace(*config.arrivals)
                                 : synth_arrivals(config.requests, config.rate, sub_seed(config.seed, "arrivals"));
    return p;
}

ApproachRun run_approach(const ExperimentConfig& config, const PreparedExperiment& prepared,
                         const Policy& policy) {
    std::unique_ptr<ModelSource> source;
    if (prepared.trace) {
        source = std::make_unique<TraceSource>(*prepared.trace, prepared.models);
    } else {
        source = std::make_unique<ProfileSource>(prepared.profiles, sub_seed(config.seed, "models"), prepared.drift);
    }
    EngineConfig engine;
    engine.controller = {config.k, config.trigger, config.window_reset};
    engine.cadence = config.cadence;
    engine.queue_capacity = config.queue_capacity;
    engine.initial_model = config.initial_model;
    engine.planner_seed = sub_seed(config.seed, "planner/" + policy.name());
    if (config.meter_watts > 0.0) {
        engine.meter = std::make_shared<WallClockMeter>(config.meter_watts);
    } else {
        engine.meter = std::make_shared<SyntheticMeter>(config.costs);
    }
    ApproachRun run;
    run.result = run_simulation(prepared.arrivals, *source, prepared.base_rules, policy, engine);
    run.report = summarize(run.result);
    return run;
}

void write_run_artifacts(const fs::path& dir, const ApproachRun& run, const ReferenceLine& line) {
    const auto& r = run.report;
    write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, std::span(&r, 1)); });
    write_file(dir / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, std::span(&r, 1)); });
    write_file(dir / "report.json", [&](std::ostream& o) { o << to_json_text(r); });
    write_file(dir / "point_cloud.csv", [&](std::ostream& o) { write_point_cloud_csv(o, run.result.log); });
    write_file(dir / "reference_line.csv", [&](std::ostream& o) { write_reference_line_csv(o, line); });
    write_file(dir / "timeline.csv", [&](std::ostream& o) { write_timeline_csv(o, run.result.timeline); });
    write_file(dir / "cumulative_energy.csv",
               [&](std::ostream& o) { write_cumulative_energy_csv(o, run.result.log); });
    write_file(dir / "log.csv", [&](std::ostream& o) { run.result.log.write_csv(o); });
    write_file(dir / "runtime_rules.csv",
               [&](std::ostream& o) { write_runtime_rules_csv(o, run.result.b_final); });
}

// Commands

LearningResult cmd_learn(const ExperimentConfig& config) {
    config.validate();
    const auto profiles = resolve_profiles(config);
    std::optional<MetricTrace> trace;
    if (config.metric_trace) trace = load_metric_trace(*config.metric_trace, model_ids(profiles));
    auto result = run_learning(config, profiles, trace);
    const fs::path dir = config.out / "learn";
    for (const auto& p : result.matrices) {
        write_file(dir / ("P_" + approach_slug(p.model.name) + ".csv"),
                   [&](std::ostream& o) { write_performance_csv(o, p); });
    }
    write_file(dir / "A.csv", [&](std::ostream& o) { write_base_rules_csv(o, result.base_rules); });
    write_file(dir / "profiles.ini", [&](std::ostream& o) { write_profiles(o, profiles); });
    return result;
}

ApproachRun cmd_run(const ExperimentConfig& config) {
    const auto prepared = prepare(config);
    const Policy policy = baseline_policy(config.policy, prepared.models, config.epsilon);
    auto run = run_approach(config, prepared, policy);
    write_run_artifacts(config.out / approach_slug(run.report.approach), run,
                        standalone_reference(config, prepared));
    return run;
}

std::vector<RunReport> cmd_sweep(const ExperimentConfig& config, const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw ConfigError("sweep needs at least one epsilon");
    const auto prepared = prepare(config);
    std::vector<Policy> policies;
    for (double e : epsilons) {
        PlannerConfig{e, 0}.validate();
        policies.push_back(Policy{PolicyKind::ecomls, std::nullopt, e});
    }
    const auto line = standalone_reference(config, prepared);
    std::vector<RunReport> reports;
    for (auto& run : run_all(config, prepared, policies)) {
        write_run_artifacts(config.out / approach_slug(run.report.approach), run, line);
        reports.push_back(std::move(run.report));
    }
    write_file(config.out / "sweep_summary.csv", [&](std::ostream& o) { write_summary_csv(o, reports); });
    write_file(config.out / "sweep_histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, reports); });
    return reports;
}

std::vector<RunReport> cmd_compare(const ExperimentConfig& config) {
    if (config.epsilons.empty()) throw ConfigError("compare needs at least one epsilon");
    const auto prepared = prepare(config);
    std::vector<Policy> policies;
    for (const auto& m : prepared.models) policies.push_back(Policy{PolicyKind::no_switch, m, 0.0});
    for (double e : config.epsilons) policies.push_back(Policy{PolicyKind::ecomls, std::nullopt, e});
    policies.push_back(Policy{PolicyKind::naive1, std::nullopt, 0.0});
    policies.push_back(Policy{PolicyKind::naive2, std::nullopt, 0.0});
    policies.push_back(Policy{PolicyKind::naive3, std::nullopt, 0.0});

    std::set<std::string> names;
    for (const auto& p : policies) {
        if (!names.insert(p.name()).second) throw ConfigError("duplicate approach '" + p.name() + "'");
    }

    auto runs = run_all(config, prepared, policies);
    std::vector<RunReport> standalone;
    for (std::size_t j = 0; j < prepared.models.size(); ++j) standalone.push_back(runs[j].report);
    const auto line = reference_line(standalone);

    std::vector<RunReport> reports;
    for (auto& run : runs) {
        write_run_artifacts(config.out / approach_slug(run.report.approach), run, line);
        reports.push_back(std::move(run.report));
    }
    write_file(config.out / "compare_summary.csv", [&](std::ostream& o) { write_summary_csv(o, reports); });
    write_file(config.out / "compare_histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, reports); });
    write_file(config.out / "reference_line.csv", [&](std::ostream& o) { write_reference_line_csv(o, line); });
    return reports;
}

}  // namespace ecoswitch
