#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "ecoswitch/types.hpp"

namespace ecoswitch {

/// Normal(mean, stddev) conditioned on [lo, hi]. `hi` may be +infinity.
struct TruncatedNormal {
    double mean = 0.0;
    double stddev = 0.0;
    double lo = 0.0;
    double hi = 1.0;

    void validate(const char* what) const;

    /// Inverse-CDF draw from a uniform in [0,1). Always lands in [lo, hi].
    double sample(double u) const;

    /// Mean after truncation.
    double truncated_mean() const;
};

struct DetectionRange {
    int lo = 0;
    int hi = 0;
};

/// Simulated stand-in for one deployable model.
struct ModelProfile {
    ModelId model;
    TruncatedNormal energy;      // joules, lo >= 0
    TruncatedNormal confidence;  // truncated to [0,1]
    TruncatedNormal proc_time;   // seconds, lo >= 0
    DetectionRange detections;

    void validate() const;
};

struct InferenceSample {
    double energy = 0.0;
    double confidence = 0.0;
    double proc_time = 0.0;
    int detections = 0;

    bool operator==(const InferenceSample&) const = default;
};

/// Deterministic draw for (profile, request_id, seed). Energy and confidence are independent.
InferenceSample infer(const ModelProfile& profile, std::uint64_t request_id, std::uint64_t seed);

/// How much spread calibrated profiles get around their target means.
struct SigmaPolicy {
    double conf_sigma = 0.12;
    double energy_rel_sigma = 0.25;  // sigma_E = ratio * target mean
    double watts = 50.0;             // mean processing time = E / watts
    double time_rel_sigma = 0.25;
    int b_lo = 0;
    int b_hi = 20;

    static SigmaPolicy zero() { return {0.0, 0.0, 50.0, 0.0, 0, 20}; }
};

struct CalibrationTarget {
    ModelId model;
    double c_avg = 0.0;
    double e_avg = 0.0;
};

/// Builds profiles whose post-truncation means hit the targets.
/// Throws CalibrationError when a target cannot be reached under truncation.
std::vector<ModelProfile> calibrate_profiles(const std::vector<CalibrationTarget>& targets,
                                             const SigmaPolicy& policy = {});

/// The four reference models (nano, small, medium, large) and their measured run averages.
std::vector<CalibrationTarget> reference_targets();

std::vector<ModelId> model_ids(const std::vector<ModelProfile>& profiles);

/// Profile file: one INI section per model, in index order, with keys
/// mu_e sigma_e mu_c sigma_c mu_t sigma_t b_lo b_hi (underlying normal parameters).
std::vector<ModelProfile> load_profiles(const std::filesystem::path& path);
void write_profiles(std::ostream& out, const std::vector<ModelProfile>& profiles);

struct TraceRecord {
    ModelId model;
    double energy = 0.0;
    double confidence = 0.0;
    double proc_time = 0.0;
    int detections = 0;
};

/// Recorded per-request metrics, replayable per model in file order.
struct MetricTrace {
    std::vector<TraceRecord> records;
};

/// CSV `model,energy_j,confidence,proc_time_s,detections`; models resolved by name or index.
MetricTrace load_metric_trace(const std::filesystem::path& path, const std::vector<ModelId>& models);

/// Per-model cursors over a MetricTrace. Exhausted cursors wrap and bump the wrap counter.
class TraceReplayer {
public:
    TraceReplayer(MetricTrace trace, const std::vector<ModelId>& models);

    /// Throws ConfigError when `model` has no records.
    const TraceRecord& replay_infer(const ModelId& model);

    std::size_t records_for(const ModelId& model) const;
    std::uint64_t wraps() const { return wraps_; }

private:
    MetricTrace trace_;
    std::vector<std::vector<std::size_t>> per_model_;  // record indices by model slot
    std::vector<std::size_t> cursor_;
    std::uint64_t wraps_ = 0;
};

/// Where the engine gets per-request metrics for the active model.
class ModelSource {
public:
    virtual ~ModelSource() = default;
    virtual InferenceSample infer(const ModelId& model, std::uint64_t request_id) = 0;
    virtual const std::vector<ModelId>& models() const = 0;
    virtual std::uint64_t wraps() const { return 0; }
};

/// Profile parameters switch to `after` from request `at_request` onward.
struct ProfileDrift {
    std::uint64_t at_request = 0;
    std::vector<ModelProfile> after;
};

class ProfileSource : public ModelSource {
public:
    ProfileSource(std::vector<ModelProfile> profiles, std::uint64_t seed,
                  std::optional<ProfileDrift> drift = std::nullopt);

    InferenceSample infer(const ModelId& model, std::uint64_t request_id) override;
    const std::vector<ModelId>& models() const override { return ids_; }

private:
    std::vector<ModelProfile> profiles_;
    std::vector<ModelId> ids_;
    std::uint64_t seed_;
    std::optional<ProfileDrift> drift_;
};

class TraceSource : public ModelSource {
public:
    TraceSource(MetricTrace trace, std::vector<ModelId> models);

    InferenceSample infer(const ModelId& model, std::uint64_t request_id) override;
    const std::vector<ModelId>& models() const override { return ids_; }
    std::uint64_t wraps() const override { return replayer_.wraps(); }

private:
    std::vector<ModelId> ids_;
    TraceReplayer replayer_;
};

}  // namespace ecoswitch
