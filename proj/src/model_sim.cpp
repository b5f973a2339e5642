#include "ecoswitch/model_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"
#include "ecoswitch/seeds.hpp"

namespace ecoswitch {

namespace {

using QuietPolicy = boost::math::policies::policy<
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>>;
const boost::math::normal_distribution<double, QuietPolicy> kStdNormal(0.0, 1.0);

double phi(double z) { return std::isinf(z) ? 0.0 : boost::math::pdf(kStdNormal, z); }

}  // namespace

// TruncatedNormal

void TruncatedNormal::validate(const char* what) const {
    if (!std::isfinite(mean) || !(stddev >= 0.0) || !std::isfinite(stddev)) {
        throw ValidationError(std::string(what) + ": mean must be finite and stddev >= 0");
    }
    if (!(lo <= hi) || std::isnan(lo) || std::isnan(hi) || std::isinf(lo)) {
        throw ValidationError(std::string(what) + ": needs finite lo <= hi");
    }
}

double TruncatedNormal::sample(double u) const {
    if (stddev == 0.0) return std::clamp(mean, lo, hi);
    const double a = (lo - mean) / stddev;
    const double b = (hi - mean) / stddev;
    double z;
    if (a >= 0.0) {
        // Upper tail: work with survival probabilities to keep precision.
        const double qa = boost::math::cdf(boost::math::complement(kStdNormal, a));
        const double qb = boost::math::cdf(boost::math::complement(kStdNormal, b));
        const double q = qa - u * (qa - qb);
        z = boost::math::quantile(boost::math::complement(kStdNormal, q));
    } else {
        const double pa = boost::math::cdf(kStdNormal, a);
        const double pb = boost::math::cdf(kStdNormal, b);
        const double p = pa + u * (pb - pa);
        z = boost::math::quantile(kStdNormal, p);
    }
    const double x = mean + stddev * z;
    if (std::isnan(x)) return std::clamp(mean, lo, hi);
    return std::clamp(x, lo, hi);
}

double TruncatedNormal::truncated_mean() const {
    if (stddev == 0.0) return std::clamp(mean, lo, hi);
    const double a = (lo - mean) / stddev;
    const double b = (hi - mean) / stddev;
    double mass;
    if (a >= 0.0) {
        mass = boost::math::cdf(boost::math::complement(kStdNormal, a)) -
               boost::math::cdf(boost::math::complement(kStdNormal, b));
    } else {
        mass = boost::math::cdf(kStdNormal, b) - boost::math::cdf(kStdNormal, a);
    }
    if (!(mass > 1e-300)) return a > 0.0 ? lo : hi;
    return std::clamp(mean + stddev * (phi(a) - phi(b)) / mass, lo, hi);
}

// ModelProfile

void ModelProfile::validate() const {
    energy.validate("energy");
    confidence.validate("confidence");
    proc_time.validate("proc_time");
    if (energy.lo < 0.0) throw ValidationError(model.name + ": energy lower bound must be >= 0");
    if (proc_time.lo < 0.0) throw ValidationError(model.name + ": proc_time lower bound must be >= 0");
    if (confidence.lo < 0.0 || confidence.hi > 1.0) {
        throw ValidationError(model.name + ": confidence bounds must lie within [0,1]");
    }
    if (confidence.mean < 0.0 || confidence.mean > 1.0) {
        throw ValidationError(model.name + ": mu_c must lie in [0,1]");
    }
    if (detections.lo < 0 || detections.lo > detections.hi) {
        throw ValidationError(model.name + ": detections need 0 <= b_lo <= b_hi");
    }
}

InferenceSample infer(const ModelProfile& profile, std::uint64_t request_id, std::uint64_t seed) {
    SplitMix64 rng(counter_seed(seed, static_cast<std::uint64_t>(profile.model.index), request_id));
    InferenceSample s;
    s.energy = profile.energy.sample(rng.uniform01());
    s.confidence = profile.confidence.sample(rng.uniform01());
    s.proc_time = profile.proc_time.sample(rng.uniform01());
    const auto span = static_cast<std::uint64_t>(profile.detections.hi - profile.detections.lo) + 1;
    s.detections = profile.detections.lo + static_cast<int>(rng() % span);
    return s;
}

// Calibration

namespace {

/// Finds the underlying mean whose truncated mean equals `target`.
double solve_underlying_mean(double target, double stddev, double lo, double hi, const std::string& what) {
    if (stddev == 0.0) return target;
    if (!(target > lo && target < hi)) {
        throw CalibrationError(what + ": target mean " + std::to_string(target) +
                               " is unreachable inside (" + std::to_string(lo) + ", " +
                               std::to_string(hi) + ")");
    }
    const double span = 30.0 * stddev;
    const double left = lo - span;
    const double right = std::isinf(hi) ? target + span : hi + span;
    auto residual = [&](double mu) { return TruncatedNormal{mu, stddev, lo, hi}.truncated_mean() - target; };
    if (residual(left) > 0.0 || residual(right) < 0.0) {
        throw CalibrationError(what + ": target mean " + std::to_string(target) +
                               " cannot be reached with stddev " + std::to_string(stddev));
    }
    boost::math::tools::eps_tolerance<double> tol(50);
    auto [a, b] = boost::math::tools::bisect(residual, left, right, tol);
    return (a + b) / 2.0;
}

}  // namespace

std::vector<ModelProfile> calibrate_profiles(const std::vector<CalibrationTarget>& targets,
                                             const SigmaPolicy& policy) {
    if (targets.empty()) throw CalibrationError("no calibration targets");
    if (policy.conf_sigma < 0.0 || policy.energy_rel_sigma < 0.0 || policy.time_rel_sigma < 0.0 ||
        !(policy.watts > 0.0)) {
        throw CalibrationError("sigma policy needs non-negative spreads and positive watts");
    }
    std::vector<ModelId> ids;
    for (const auto& t : targets) ids.push_back(t.model);
    validate_model_set(ids);

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<ModelProfile> profiles;
    for (const auto& t : targets) {
        if (!(t.c_avg >= 0.0 && t.c_avg < 1.0)) {
            throw CalibrationError(t.model.name + ": confidence target " + std::to_string(t.c_avg) +
                                   " must lie in [0,1)");
        }
        if (!(t.e_avg > 0.0) || !std::isfinite(t.e_avg)) {
            throw CalibrationError(t.model.name + ": energy target must be > 0");
        }
        const double sigma_e = policy.energy_rel_sigma * t.e_avg;
        const double mu_t = t.e_avg / policy.watts;
        const double sigma_t = policy.time_rel_sigma * mu_t;

        ModelProfile p;
        p.model = t.model;
        p.confidence = {solve_underlying_mean(t.c_avg, policy.conf_sigma, 0.0, 1.0, t.model.name + " confidence"),
                        policy.conf_sigma, 0.0, 1.0};
        p.energy = {solve_underlying_mean(t.e_avg, sigma_e, 0.0, inf, t.model.name + " energy"),
                    sigma_e, 0.0, inf};
        p.proc_time = {solve_underlying_mean(mu_t, sigma_t, 0.0, inf, t.model.name + " proc_time"),
                       sigma_t, 0.0, inf};
        p.detections = {policy.b_lo, policy.b_hi};
        try {
            p.validate();
        } catch (const ValidationError& e) {
            throw CalibrationError(std::string("calibrated profile is invalid: ") + e.what());
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

std::vector<CalibrationTarget> reference_targets() {
    return {
        {{1, "nano"}, 0.536, 1.61},
        {{2, "small"}, 0.611, 4.327},
        {{3, "medium"}, 0.652, 8.918},
        {{4, "large"}, 0.675, 17.705},
    };
}

std::vector<ModelId> model_ids(const std::vector<ModelProfile>& profiles) {
    std::vector<ModelId> ids;
    ids.reserve(profiles.size());
    for (const auto& p : profiles) ids.push_back(p.model);
    return ids;
}

// Profile file

std::vector<ModelProfile> load_profiles(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError(path.string() + ": profile file not found");
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(path.string(), e.line(), e.message());
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<ModelProfile> profiles;
    int index = 0;
    for (const auto& [name, section] : tree) {
        if (section.empty()) {
            throw ConfigError(path.string() + ": key '" + name + "' must live inside a [model] section");
        }
        auto get = [&, &name = name, &section = section](const char* key) {
            auto v = section.get_optional<double>(key);
            if (!v) throw ConfigError(path.string() + ": [" + name + "] is missing '" + key + "'");
            return *v;
        };
        ModelProfile p;
        p.model = {++index, name};
        p.energy = {get("mu_e"), get("sigma_e"), 0.0, inf};
        p.confidence = {get("mu_c"), get("sigma_c"), 0.0, 1.0};
        p.proc_time = {get("mu_t"), get("sigma_t"), 0.0, inf};
        p.detections = {static_cast<int>(get("b_lo")), static_cast<int>(get("b_hi"))};
        p.validate();
        profiles.push_back(std::move(p));
    }
    if (profiles.empty()) throw ConfigError(path.string() + ": no model sections");
    return profiles;
}

void write_profiles(std::ostream& out, const std::vector<ModelProfile>& profiles) {
    bool first = true;
    for (const auto& p : profiles) {
        if (!first) out << '\n';
        first = false;
        out << '[' << p.model.name << "]\n"
            << "mu_e = " << csv::num(p.energy.mean) << '\n'
            << "sigma_e = " << csv::num(p.energy.stddev) << '\n'
            << "mu_c = " << csv::num(p.confidence.mean) << '\n'
            << "sigma_c = " << csv::num(p.confidence.stddev) << '\n'
            << "mu_t = " << csv::num(p.proc_time.mean) << '\n'
            << "sigma_t = " << csv::num(p.proc_time.stddev) << '\n'
            << "b_lo = " << p.detections.lo << '\n'
            << "b_hi = " << p.detections.hi << '\n';
    }
}

// Trace replay

MetricTrace load_metric_trace(const std::filesystem::path& path, const std::vector<ModelId>& models) {
    auto lines = csv::read_lines(path);
    const std::string where = path.string();
    if (lines.empty() || lines[0] != "model,energy_j,confidence,proc_time_s,detections") {
        throw ParseError(where, 1, "expected header 'model,energy_j,confidence,proc_time_s,detections'");
    }
    MetricTrace trace;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = csv::split(lines[i]);
        if (f.size() != 5) throw ParseError(where, i + 1, "expected 5 fields");
        TraceRecord r{find_model(models, f[0]), csv::parse_double(f[1], where, i + 1),
                      csv::parse_double(f[2], where, i + 1), csv::parse_double(f[3], where, i + 1),
                      static_cast<int>(csv::parse_int(f[4], where, i + 1))};
        if (r.energy < 0.0 || r.confidence < 0.0 || r.confidence > 1.0 || r.proc_time < 0.0 ||
            r.detections < 0) {
            throw ParseError(where, i + 1, "field out of range");
        }
        trace.records.push_back(std::move(r));
    }
    return trace;
}

TraceReplayer::TraceReplayer(MetricTrace trace, const std::vector<ModelId>& models)
    : trace_(std::move(trace)), per_model_(models.size()), cursor_(models.size(), 0) {
    validate_model_set(models);
    for (std::size_t i = 0; i < trace_.records.size(); ++i) {
        const auto& m = trace_.records[i].model;
        if (m.index < 1 || m.slot() >= models.size()) {
            throw ConfigError("trace record " + std::to_string(i + 1) + " names an unknown model");
        }
        per_model_[m.slot()].push_back(i);
    }
}

std::size_t TraceReplayer::records_for(const ModelId& model) const {
    if (model.index < 1 || model.slot() >= per_model_.size()) return 0;
    return per_model_[model.slot()].size();
}

const TraceRecord& TraceReplayer::replay_infer(const ModelId& model) {
    if (model.index < 1 || model.slot() >= per_model_.size() || per_model_[model.slot()].empty()) {
        throw ConfigError("trace has no records for model '" + model.name + "'");
    }
    auto& order = per_model_[model.slot()];
    auto& cursor = cursor_[model.slot()];
    if (cursor == order.size()) {
        cursor = 0;
        ++wraps_;
    }
    return trace_.records[order[cursor++]];
}

// Sources

ProfileSource::ProfileSource(std::vector<ModelProfile> profiles, std::uint64_t seed,
                             std::optional<ProfileDrift> drift)
    : profiles_(std::move(profiles)), ids_(model_ids(profiles_)), seed_(seed), drift_(std::move(drift)) {
    validate_model_set(ids_);
    for (const auto& p : profiles_) p.validate();
    if (drift_) {
        if (model_ids(drift_->after) != ids_) {
            throw ConfigError("drifted profiles must cover the same models in the same order");
        }
        for (const auto& p : drift_->after) p.validate();
    }
}

InferenceSample ProfileSource::infer(const ModelId& model, std::uint64_t request_id) {
    if (model.index < 1 || model.slot() >= profiles_.size()) {
        throw ConfigError("unknown model '" + model.name + "'");
    }
    const auto& set = (drift_ && request_id >= drift_->at_request) ? drift_->after : profiles_;
    return ecoswitch::infer(set[model.slot()], request_id, seed_);
}

TraceSource::TraceSource(MetricTrace trace, std::vector<ModelId> models)
    : ids_(std::move(models)), replayer_(std::move(trace), ids_) {
    for (const auto& id : ids_) {
        if (replayer_.records_for(id) == 0) {
            throw ConfigError("trace has no records for registered model '" + id.name + "'");
        }
    }
}

InferenceSample TraceSource::infer(const ModelId& model, std::uint64_t) {
    const auto& r = replayer_.replay_infer(model);
    return {r.energy, r.confidence, r.proc_time, r.detections};
}

}  // namespace ecoswitch
