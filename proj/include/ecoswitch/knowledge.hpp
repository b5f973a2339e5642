#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ecoswitch/types.hpp"

namespace ecoswitch {

/// Fixed-capacity ring buffer of doubles with an incrementally maintained sum.
///
/// The running sum is resynchronised from the stored values every time the
/// write cursor wraps, so accumulated rounding is bounded by `capacity` updates.
class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity);

    void push(double value);
    void clear();

    std::size_t capacity() const { return values_.size(); }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    bool full() const { return size_ == values_.size(); }

    /// Throws NoDataError when empty.
    double mean() const;
    double latest() const;

    /// Contents in insertion order, oldest first.
    std::vector<double> values() const;

private:
    std::vector<double> values_;
    std::size_t head_ = 0;  // next write slot
    std::size_t size_ = 0;
    double sum_ = 0.0;
};

/// Monitor window over the last k processed requests.
class SlidingWindow {
public:
    explicit SlidingWindow(std::size_t k);

    void push(double energy, double confidence);
    void clear() {
        energy_.clear();
        confidence_.clear();
    }

    std::size_t capacity() const { return energy_.capacity(); }
    std::size_t size() const { return energy_.size(); }
    bool empty() const { return energy_.empty(); }

    const RingBuffer& energies() const { return energy_; }
    const RingBuffer& confidences() const { return confidence_; }

private:
    RingBuffer energy_;
    RingBuffer confidence_;
};

struct WindowStats {
    double e_bar = 0.0;
    double c_bar = 0.0;
};

/// Means over the buffered observations (partial windows allowed). Throws NoDataError when empty.
WindowStats window_stats(const SlidingWindow& window);

struct RequestLogEntry {
    std::uint64_t request_id = 0;
    double arrival_time = 0.0;  // seconds, simulated clock
    ModelId model;
    double energy = 0.0;        // joules
    double confidence = 0.0;
    double model_proc_time = 0.0;   // t_mp
    double system_proc_time = 0.0;  // t_sys: arrival to completion
    int detections = 0;
};

/// Throws ValidationError when an entry breaks its field domains.
void validate_entry(const RequestLogEntry& entry);

/// Append-only record of every processed request, in arrival order.
class LogRepository {
public:
    using const_iterator = std::vector<RequestLogEntry>::const_iterator;

    /// Throws OrderingError unless entry.request_id exceeds every stored id.
    void log_request(RequestLogEntry entry);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const RequestLogEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<RequestLogEntry>& entries() const { return entries_; }
    const_iterator begin() const { return entries_.begin(); }
    const_iterator end() const { return entries_.end(); }

    void reserve(std::size_t n) { entries_.reserve(n); }

    void write_csv(std::ostream& out) const;
    void export_csv(const std::filesystem::path& path) const;

private:
    std::vector<RequestLogEntry> entries_;
};

/// One row of the base-rule matrix A.
struct BaseRuleRow {
    ModelId model;
    double e_min = 0.0;
    double e_max = 0.0;
    double c_avg = 0.0;

    double e_avg() const { return (e_min + e_max) / 2.0; }
};

void validate_row(const BaseRuleRow& row);

/// One row of the runtime-rule matrix B.
struct RuntimeRuleRow {
    ModelId model;
    double e_min = 0.0;
    double e_max = 0.0;
    double e_latest = 0.0;
    double c_avg = 0.0;
    RingBuffer c_window{1};

    double e_avg() const { return (e_min + e_max) / 2.0; }
};

/// B from A: e_latest starts at the energy midpoint, c_avg at A's value with an empty window.
std::vector<RuntimeRuleRow> init_runtime_rules(const std::vector<BaseRuleRow>& base, std::size_t k);

/// Records an observation: e_latest := energy, confidence enters the window, c_avg := window mean.
RuntimeRuleRow update_runtime_rules(RuntimeRuleRow row, double energy, double confidence);

/// Confidence-only variant; leaves every energy column untouched.
RuntimeRuleRow update_runtime_confidence(RuntimeRuleRow row, double confidence);

/// Matrix A as CSV: `model,e_min,e_max,c_avg`.
void write_base_rules_csv(std::ostream& out, const std::vector<BaseRuleRow>& rows);

/// Matrix B as CSV: `model,e_min,e_max,e_latest,c_avg,c_window` (window values ';'-joined).
void write_runtime_rules_csv(std::ostream& out, const std::vector<RuntimeRuleRow>& rows);

/// Reads matrix A back from its CSV export; model ids are resolved against `models`.
std::vector<BaseRuleRow> read_base_rules_csv(const std::filesystem::path& path,
                                             const std::vector<ModelId>& models);

}  // namespace ecoswitch
