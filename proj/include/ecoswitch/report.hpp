#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ecoswitch/engine.hpp"
#include "ecoswitch/knowledge.hpp"
#include "ecoswitch/mapek.hpp"

namespace ecoswitch {

/// Unit-width score bins [0,1) .. [6,7) plus an overflow bin [7, inf).
struct ScoreHistogram {
    static constexpr std::size_t kBins = 8;
    static constexpr std::size_t kOverflow = kBins - 1;

    std::array<std::uint64_t, kBins> counts{};

    void add(double score);
    std::uint64_t total() const;

    static double bin_lo(std::size_t i) { return static_cast<double>(i); }
    static double bin_hi(std::size_t i) {
        return i == kOverflow ? std::numeric_limits<double>::infinity() : static_cast<double>(i + 1);
    }

    bool operator==(const ScoreHistogram&) const = default;
};

/// Index of the half-open bin holding `score`; kOverflow for scores >= 7.
/// Throws ValidationError for negative or non-finite scores.
std::size_t bin_score(double score);

/// Table-style outcome of one run. Energies are per-request averages in joules.
struct RunReport {
    std::string approach;
    std::uint64_t requests = 0;
    double c_avg = 0.0;
    double e_avg = 0.0;
    double e_monitor = 0.0;
    double e_analyzer = 0.0;
    double e_planner = 0.0;
    double e_executor = 0.0;
    double e_mapek = 0.0;
    double e_total = 0.0;
    double mean_score = 0.0;
    std::uint64_t switch_count = 0;
    ScoreHistogram histogram;
    std::uint64_t wraps = 0;
    std::uint64_t drops = 0;

    bool operator==(const RunReport&) const = default;
};

/// Aggregates a run's log. Throws NoDataError on an empty log.
RunReport summarize(const LogRepository& log, const PhaseEnergy& phases, std::uint64_t switches,
                    std::string approach = {});
RunReport summarize(const RunResult& run);

/// Endpoints of the energy/confidence trade-off line: (min E, min C) and (max E, max C).
struct ReferenceLine {
    double energy_lo = 0.0;
    double confidence_lo = 0.0;
    double energy_hi = 0.0;
    double confidence_hi = 0.0;
};

/// Built from standalone per-model averages (E_avg, C_avg).
ReferenceLine reference_line(std::span<const RunReport> standalone);

// CSV writers. Headers are fixed; numbers use shortest round-trip formatting.

/// `approach,c_avg,e_avg,e_monitor,e_analyzer,e_planner,e_executor,e_mapek,e_total,switches`
void write_summary_csv(std::ostream& out, std::span<const RunReport> reports);
/// `approach,bin_lo,bin_hi,count`
void write_histogram_csv(std::ostream& out, std::span<const RunReport> reports);
/// `request_id,model,energy_j,confidence,score`
void write_point_cloud_csv(std::ostream& out, const LogRepository& log);
/// `tick,virtual_time_s,from_model,to_model,reason`
void write_timeline_csv(std::ostream& out, std::span<const SwitchEvent> timeline);
/// `request_id,cumulative_energy_j`
void write_cumulative_energy_csv(std::ostream& out, const LogRepository& log);
/// `point,energy_j,confidence`
void write_reference_line_csv(std::ostream& out, const ReferenceLine& line);

/// Reads a summary CSV back. Histogram, request count, score mean and counters are not carried.
std::vector<RunReport> read_summary_csv(const std::filesystem::path& path);

enum class ExportFormat { csv, json };

/// Writes one report (CSV: summary row; JSON: every field). Throws IoError with the path.
void export_report(const RunReport& report, ExportFormat format, const std::filesystem::path& path);
RunReport read_report_json(const std::filesystem::path& path);

std::string to_json_text(const RunReport& report);
RunReport from_json_text(const std::string& text);

}  // namespace ecoswitch
