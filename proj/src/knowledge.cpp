#include "ecoswitch/knowledge.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"

namespace ecoswitch {

namespace {

void check_confidence(double confidence) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw ValidationError("confidence " + std::to_string(confidence) + " outside [0,1]");
    }
}

void check_energy(double energy) {
    if (!(energy >= 0.0) || !std::isfinite(energy)) {
        throw ValidationError("energy " + std::to_string(energy) + " must be a finite value >= 0");
    }
}

}  // namespace

// RingBuffer

RingBuffer::RingBuffer(std::size_t capacity) : values_(capacity, 0.0) {
    if (capacity == 0) throw ConfigError("window capacity k must be >= 1");
}

void RingBuffer::push(double value) {
    if (full()) {
        sum_ -= values_[head_];
    } else {
        ++size_;
    }
    values_[head_] = value;
    sum_ += value;
    head_ = (head_ + 1) % values_.size();
    if (head_ == 0) {
        double exact = 0.0;
        for (std::size_t i = 0; i < size_; ++i) exact += values_[i];
        sum_ = exact;
    }
}

void RingBuffer::clear() {
    head_ = 0;
    size_ = 0;
    sum_ = 0.0;
}

double RingBuffer::mean() const {
    if (empty()) throw NoDataError("mean of an empty window");
    return sum_ / static_cast<double>(size_);
}

double RingBuffer::latest() const {
    if (empty()) throw NoDataError("latest value of an empty window");
    return values_[(head_ + values_.size() - 1) % values_.size()];
}

std::vector<double> RingBuffer::values() const {
    std::vector<double> out;
    out.reserve(size_);
    std::size_t start = full() ? head_ : 0;
    for (std::size_t i = 0; i < size_; ++i) out.push_back(values_[(start + i) % values_.size()]);
    return out;
}

// SlidingWindow

SlidingWindow::SlidingWindow(std::size_t k) : energy_(k), confidence_(k) {}

void SlidingWindow::push(double energy, double confidence) {
    energy_.push(energy);
    confidence_.push(confidence);
}

WindowStats window_stats(const SlidingWindow& window) {
    if (window.empty()) throw NoDataError("monitor window has no observations");
    return {window.energies().mean(), window.confidences().mean()};
}

// Log repository

void validate_entry(const RequestLogEntry& entry) {
    check_energy(entry.energy);
    check_confidence(entry.confidence);
    if (entry.model_proc_time < 0.0) throw ValidationError("model processing time must be >= 0");
    if (entry.system_proc_time < entry.model_proc_time) {
        throw ValidationError("system processing time must be >= model processing time");
    }
    if (entry.detections < 0) throw ValidationError("detection count must be >= 0");
}

void LogRepository::log_request(RequestLogEntry entry) {
    if (!entries_.empty() && entry.request_id <= entries_.back().request_id) {
        throw OrderingError("request id " + std::to_string(entry.request_id) +
                            " does not follow " + std::to_string(entries_.back().request_id));
    }
    validate_entry(entry);
    entries_.push_back(std::move(entry));
}

void LogRepository::write_csv(std::ostream& out) const {
    out << "request_id,arrival_time,model,energy_j,confidence,model_proc_time_s,"
           "system_proc_time_s,detections\n";
    for (const auto& e : entries_) {
        out << e.request_id << ',' << csv::num(e.arrival_time) << ',' << e.model.name << ','
            << csv::num(e.energy) << ',' << csv::num(e.confidence) << ','
            << csv::num(e.model_proc_time) << ',' << csv::num(e.system_proc_time) << ','
            << e.detections << '\n';
    }
}

void LogRepository::export_csv(const std::filesystem::path& path) const {
    auto out = csv::open_output(path);
    write_csv(out);
    if (!out) throw IoError(path.string() + ": write failed");
}

// Rule matrices

void validate_row(const BaseRuleRow& row) {
    if (!(row.e_min >= 0.0 && row.e_min <= row.e_max)) {
        throw ValidationError("rule row for " + row.model.name + " needs 0 <= e_min <= e_max");
    }
    check_confidence(row.c_avg);
}

std::vector<RuntimeRuleRow> init_runtime_rules(const std::vector<BaseRuleRow>& base, std::size_t k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (base.empty()) throw ConfigError("base rules are empty");
    std::vector<RuntimeRuleRow> rows;
    rows.reserve(base.size());
    for (const auto& a : base) {
        validate_row(a);
        RuntimeRuleRow b{a.model, a.e_min, a.e_max, a.e_avg(), a.c_avg, RingBuffer(k)};
        rows.push_back(std::move(b));
    }
    return rows;
}

RuntimeRuleRow update_runtime_rules(RuntimeRuleRow row, double energy, double confidence) {
    check_energy(energy);
    check_confidence(confidence);
    row.e_latest = energy;
    row.c_window.push(confidence);
    row.c_avg = row.c_window.mean();
    return row;
}

RuntimeRuleRow update_runtime_confidence(RuntimeRuleRow row, double confidence) {
    check_confidence(confidence);
    row.c_window.push(confidence);
    row.c_avg = row.c_window.mean();
    return row;
}

void write_base_rules_csv(std::ostream& out, const std::vector<BaseRuleRow>& rows) {
    out << "model,e_min,e_max,c_avg\n";
    for (const auto& r : rows) {
        out << r.model.name << ',' << csv::num(r.e_min) << ',' << csv::num(r.e_max) << ','
            << csv::num(r.c_avg) << '\n';
    }
}

void write_runtime_rules_csv(std::ostream& out, const std::vector<RuntimeRuleRow>& rows) {
    out << "model,e_min,e_max,e_latest,c_avg,c_window\n";
    for (const auto& r : rows) {
        out << r.model.name << ',' << csv::num(r.e_min) << ',' << csv::num(r.e_max) << ','
            << csv::num(r.e_latest) << ',' << csv::num(r.c_avg) << ',';
        bool first = true;
        for (double c : r.c_window.values()) {
            if (!first) out << ';';
            out << csv::num(c);
            first = false;
        }
        out << '\n';
    }
}

std::vector<BaseRuleRow> read_base_rules_csv(const std::filesystem::path& path,
                                             const std::vector<ModelId>& models) {
    auto lines = csv::read_lines(path);
    const std::string where = path.string();
    if (lines.empty() || lines[0] != "model,e_min,e_max,c_avg") {
        throw ParseError(where, 1, "expected header 'model,e_min,e_max,c_avg'");
    }
    std::vector<BaseRuleRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = csv::split(lines[i]);
        if (f.size() != 4) throw ParseError(where, i + 1, "expected 4 fields");
        BaseRuleRow row{find_model(models, f[0]), csv::parse_double(f[1], where, i + 1),
                        csv::parse_double(f[2], where, i + 1),
                        csv::parse_double(f[3], where, i + 1)};
        validate_row(row);
        rows.push_back(std::move(row));
    }
    if (rows.size() != models.size()) {
        throw ParseError(where, lines.size(), "expected one row per model (" +
                                                  std::to_string(models.size()) + ")");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].model.index != static_cast<int>(j + 1)) {
            throw ParseError(where, j + 2, "rows must be in model-index order");
        }
    }
    return rows;
}

}  // namespace ecoswitch
