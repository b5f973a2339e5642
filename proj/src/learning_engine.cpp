#include "ecoswitch/learning_engine.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"

namespace ecoswitch {

EvaluationDataset EvaluationDataset::sequential(std::size_t r) {
    EvaluationDataset d;
    d.requests.resize(r);
    std::iota(d.requests.begin(), d.requests.end(), std::uint64_t{1});
    return d;
}

void EvaluationDataset::validate() const {
    if (requests.empty()) throw ConfigError("evaluation dataset is empty");
    std::unordered_set<std::uint64_t> seen;
    for (auto id : requests) {
        if (!seen.insert(id).second) {
            throw ConfigError("evaluation dataset repeats request id " + std::to_string(id));
        }
    }
}

PerformanceMatrix evaluate_model(const ModelProfile& model, const EvaluationDataset& dataset,
                                 std::uint64_t seed) {
    dataset.validate();
    model.validate();
    PerformanceMatrix p{model.model, {}};
    p.rows.reserve(dataset.requests.size());
    for (auto id : dataset.requests) {
        auto s = infer(model, id, seed);
        p.rows.push_back({id, s.energy, s.confidence, s.proc_time});
    }
    return p;
}

BaseRuleRow aggregate_rules(const PerformanceMatrix& p) {
    if (p.rows.empty()) throw NoDataError("performance matrix for " + p.model.name + " is empty");
    auto [lo, hi] = std::minmax_element(p.rows.begin(), p.rows.end(),
                                        [](const auto& a, const auto& b) { return a.energy < b.energy; });
    // Summing in sorted order makes the mean independent of row order.
    std::vector<double> conf;
    conf.reserve(p.rows.size());
    for (const auto& r : p.rows) conf.push_back(r.confidence);
    std::sort(conf.begin(), conf.end());
    const double c_avg = std::accumulate(conf.begin(), conf.end(), 0.0) / static_cast<double>(conf.size());
    BaseRuleRow row{p.model, lo->energy, hi->energy, c_avg};
    validate_row(row);
    return row;
}

LearningResult learn(const std::vector<ModelProfile>& models, const EvaluationDataset& dataset,
                     std::uint64_t seed) {
    if (models.empty()) throw ConfigError("at least one model is required");
    validate_model_set(model_ids(models));
    LearningResult out;
    for (const auto& m : models) {
        out.matrices.push_back(evaluate_model(m, dataset, seed));
        out.base_rules.push_back(aggregate_rules(out.matrices.back()));
    }
    return out;
}

std::vector<BaseRuleRow> build_base_rules(const std::vector<ModelProfile>& models,
                                          const EvaluationDataset& dataset, std::uint64_t seed) {
    return learn(models, dataset, seed).base_rules;
}

void write_performance_csv(std::ostream& out, const PerformanceMatrix& p) {
    out << "request_id,energy_j,confidence,proc_time_s\n";
    for (const auto& r : p.rows) {
        out << r.request_id << ',' << csv::num(r.energy) << ',' << csv::num(r.confidence) << ','
            << csv::num(r.proc_time) << '\n';
    }
}

PerformanceMatrix read_performance_csv(const std::filesystem::path& path, const ModelId& model) {
    auto lines = csv::read_lines(path);
    const std::string where = path.string();
    if (lines.empty() || lines[0] != "request_id,energy_j,confidence,proc_time_s") {
        throw ParseError(where, 1, "expected header 'request_id,energy_j,confidence,proc_time_s'");
    }
    PerformanceMatrix p{model, {}};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = csv::split(lines[i]);
        if (f.size() != 4) throw ParseError(where, i + 1, "expected 4 fields");
        p.rows.push_back({static_cast<std::uint64_t>(csv::parse_int(f[0], where, i + 1)),
                          csv::parse_double(f[1], where, i + 1), csv::parse_double(f[2], where, i + 1),
                          csv::parse_double(f[3], where, i + 1)});
    }
    return p;
}

}  // namespace ecoswitch
