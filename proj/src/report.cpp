#include "ecoswitch/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"
#include "json.hpp"

namespace ecoswitch {

std::size_t bin_score(double score) {
    if (!(score >= 0.0) || std::isnan(score)) {
        throw ValidationError("score must be >= 0, got " + std::to_string(score));
    }
    if (score >= static_cast<double>(ScoreHistogram::kOverflow)) return ScoreHistogram::kOverflow;
    return static_cast<std::size_t>(std::floor(score));
}

void ScoreHistogram::add(double score) { ++counts[bin_score(score)]; }

std::uint64_t ScoreHistogram::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

RunReport summarize(const LogRepository& log, const PhaseEnergy& phases, std::uint64_t switches,
                    std::string approach) {
    if (log.empty()) throw NoDataError("cannot summarize an empty log");
    RunReport r;
    r.approach = std::move(approach);
    r.requests = log.size();
    double conf = 0.0, energy = 0.0, score = 0.0;
    for (const auto& e : log) {
        const double s = compute_score(e.energy, e.confidence);
        conf += e.confidence;
        energy += e.energy;
        score += s;
        r.histogram.add(s);
    }
    const auto n = static_cast<double>(log.size());
    r.c_avg = conf / n;
    r.e_avg = energy / n;
    r.mean_score = score / n;
    r.e_monitor = phases.monitor / n;
    r.e_analyzer = phases.analyzer / n;
    r.e_planner = phases.planner / n;
    r.e_executor = phases.executor / n;
    r.e_mapek = r.e_monitor + r.e_analyzer + r.e_planner + r.e_executor;
    r.e_total = r.e_avg + r.e_mapek;
    r.switch_count = switches;
    return r;
}

RunReport summarize(const RunResult& run) {
    RunReport r = summarize(run.log, run.phase_energy, run.switch_count, run.approach);
    r.wraps = run.wraps;
    r.drops = run.drops;
    return r;
}

ReferenceLine reference_line(std::span<const RunReport> standalone) {
    if (standalone.empty()) throw NoDataError("reference line needs at least one standalone run");
    ReferenceLine line{standalone[0].e_avg, standalone[0].c_avg, standalone[0].e_avg, standalone[0].c_avg};
    for (const auto& r : standalone) {
        line.energy_lo = std::min(line.energy_lo, r.e_avg);
        line.energy_hi = std::max(line.energy_hi, r.e_avg);
        line.confidence_lo = std::min(line.confidence_lo, r.c_avg);
        line.confidence_hi = std::max(line.confidence_hi, r.c_avg);
    }
    return line;
}

// CSV

void write_summary_csv(std::ostream& out, std::span<const RunReport> reports) {
    out << "approach,c_avg,e_avg,e_monitor,e_analyzer,e_planner,e_executor,e_mapek,e_total,switches\n";
    for (const auto& r : reports) {
        out << r.approach << ',' << csv::num(r.c_avg) << ',' << csv::num(r.e_avg) << ','
            << csv::num(r.e_monitor) << ',' << csv::num(r.e_analyzer) << ',' << csv::num(r.e_planner)
            << ',' << csv::num(r.e_executor) << ',' << csv::num(r.e_mapek) << ','
            << csv::num(r.e_total) << ',' << r.switch_count << '\n';
    }
}

void write_histogram_csv(std::ostream& out, std::span<const RunReport> reports) {
    out << "approach,bin_lo,bin_hi,count\n";
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < ScoreHistogram::kBins; ++i) {
            out << r.approach << ',' << csv::num(ScoreHistogram::bin_lo(i)) << ','
                << (i == ScoreHistogram::kOverflow ? std::string("inf") : csv::num(ScoreHistogram::bin_hi(i)))
                << ',' << r.histogram.counts[i] << '\n';
        }
    }
}

void write_point_cloud_csv(std::ostream& out, const LogRepository& log) {
    out << "request_id,model,energy_j,confidence,score\n";
    for (const auto& e : log) {
        out << e.request_id << ',' << e.model.name << ',' << csv::num(e.energy) << ','
            << csv::num(e.confidence) << ',' << csv::num(compute_score(e.energy, e.confidence)) << '\n';
    }
}

void write_timeline_csv(std::ostream& out, std::span<const SwitchEvent> timeline) {
    out << "tick,virtual_time_s,from_model,to_model,reason\n";
    for (const auto& s : timeline) {
        out << s.tick << ',' << csv::num(s.virtual_time) << ',' << s.from.name << ',' << s.to.name << ','
            << to_string(s.reason) << '\n';
    }
}

void write_cumulative_energy_csv(std::ostream& out, const LogRepository& log) {
    out << "request_id,cumulative_energy_j\n";
    double total = 0.0;
    for (const auto& e : log) {
        total += e.energy;
        out << e.request_id << ',' << csv::num(total) << '\n';
    }
}

void write_reference_line_csv(std::ostream& out, const ReferenceLine& line) {
    out << "point,energy_j,confidence\n"
        << "low," << csv::num(line.energy_lo) << ',' << csv::num(line.confidence_lo) << '\n'
        << "high," << csv::num(line.energy_hi) << ',' << csv::num(line.confidence_hi) << '\n';
}

std::vector<RunReport> read_summary_csv(const std::filesystem::path& path) {
    auto lines = csv::read_lines(path);
    const std::string where = path.string();
    if (lines.empty() ||
        lines[0] != "approach,c_avg,e_avg,e_monitor,e_analyzer,e_planner,e_executor,e_mapek,e_total,switches") {
        throw ParseError(where, 1, "unexpected summary header");
    }
    std::vector<RunReport> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = csv::split(lines[i]);
        if (f.size() != 10) throw ParseError(where, i + 1, "expected 10 fields");
        RunReport r;
        r.approach = f[0];
        r.c_avg = csv::parse_double(f[1], where, i + 1);
        r.e_avg = csv::parse_double(f[2], where, i + 1);
        r.e_monitor = csv::parse_double(f[3], where, i + 1);
        r.e_analyzer = csv::parse_double(f[4], where, i + 1);
        r.e_planner = csv::parse_double(f[5], where, i + 1);
        r.e_executor = csv::parse_double(f[6], where, i + 1);
        r.e_mapek = csv::parse_double(f[7], where, i + 1);
        r.e_total = csv::parse_double(f[8], where, i + 1);
        r.switch_count = static_cast<std::uint64_t>(csv::parse_int(f[9], where, i + 1));
        out.push_back(std::move(r));
    }
    return out;
}

// JSON

std::string to_json_text(const RunReport& r) {
    nlohmann::ordered_json j;
    j["approach"] = r.approach;
    j["requests"] = r.requests;
    j["c_avg"] = r.c_avg;
    j["e_avg"] = r.e_avg;
    j["e_monitor"] = r.e_monitor;
    j["e_analyzer"] = r.e_analyzer;
    j["e_planner"] = r.e_planner;
    j["e_executor"] = r.e_executor;
    j["e_mapek"] = r.e_mapek;
    j["e_total"] = r.e_total;
    j["mean_score"] = r.mean_score;
    j["switches"] = r.switch_count;
    j["histogram"] = r.histogram.counts;
    j["wraps"] = r.wraps;
    j["drops"] = r.drops;
    return j.dump(2) + "\n";
}

RunReport from_json_text(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        RunReport r;
        r.approach = j.at("approach").get<std::string>();
        r.requests = j.at("requests").get<std::uint64_t>();
        r.c_avg = j.at("c_avg").get<double>();
        r.e_avg = j.at("e_avg").get<double>();
        r.e_monitor = j.at("e_monitor").get<double>();
        r.e_analyzer = j.at("e_analyzer").get<double>();
        r.e_planner = j.at("e_planner").get<double>();
        r.e_executor = j.at("e_executor").get<double>();
        r.e_mapek = j.at("e_mapek").get<double>();
        r.e_total = j.at("e_total").get<double>();
        r.mean_score = j.at("mean_score").get<double>();
        r.switch_count = j.at("switches").get<std::uint64_t>();
        r.histogram.counts = j.at("histogram").get<std::array<std::uint64_t, ScoreHistogram::kBins>>();
        r.wraps = j.at("wraps").get<std::uint64_t>();
        r.drops = j.at("drops").get<std::uint64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report JSON: ") + e.what());
    }
}

void export_report(const RunReport& report, ExportFormat format, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    if (format == ExportFormat::csv) {
        write_summary_csv(out, std::span(&report, 1));
    } else {
        out << to_json_text(report);
    }
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
}

RunReport read_report_json(const std::filesystem::path& path) {
    auto in = csv::open_input(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

}  // namespace ecoswitch
