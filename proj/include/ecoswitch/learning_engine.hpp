#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ecoswitch/knowledge.hpp"
#include "ecoswitch/model_sim.hpp"

namespace ecoswitch {

/// Offline evaluation requests. Ids are opaque; in simulation each id seeds the sampler.
struct EvaluationDataset {
    std::vector<std::uint64_t> requests;

    /// Ids 1..r.
    static EvaluationDataset sequential(std::size_t r);

    /// Throws ConfigError when empty or ids repeat.
    void validate() const;
};

struct PerformanceRow {
    std::uint64_t request_id = 0;
    double energy = 0.0;
    double confidence = 0.0;
    double proc_time = 0.0;

    bool operator==(const PerformanceRow&) const = default;
};

/// Per-model evaluation results, one row per dataset request in dataset order.
struct PerformanceMatrix {
    ModelId model;
    std::vector<PerformanceRow> rows;
};

PerformanceMatrix evaluate_model(const ModelProfile& model, const EvaluationDataset& dataset,
                                 std::uint64_t seed);

/// e_min/e_max over energies, c_avg the mean confidence. Order-insensitive bit for bit.
BaseRuleRow aggregate_rules(const PerformanceMatrix& p);

struct LearningResult {
    std::vector<PerformanceMatrix> matrices;
    std::vector<BaseRuleRow> base_rules;  // matrix A, model-index order
};

LearningResult learn(const std::vector<ModelProfile>& models, const EvaluationDataset& dataset,
                     std::uint64_t seed);

std::vector<BaseRuleRow> build_base_rules(const std::vector<ModelProfile>& models,
                                          const EvaluationDataset& dataset, std::uint64_t seed);

/// P_j as CSV: `request_id,energy_j,confidence,proc_time_s`.
void write_performance_csv(std::ostream& out, const PerformanceMatrix& p);
PerformanceMatrix read_performance_csv(const std::filesystem::path& path, const ModelId& model);

}  // namespace ecoswitch
