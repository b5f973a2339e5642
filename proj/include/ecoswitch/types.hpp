#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ecoswitch {

/// Identity of one switchable model. Indices are 1-based and dense over a model set.
struct ModelId {
    int index = 1;
    std::string name;

    bool operator==(const ModelId& other) const { return index == other.index; }
    auto operator<=>(const ModelId& other) const { return index <=> other.index; }

    /// Zero-based slot for indexing per-model vectors.
    std::size_t slot() const { return static_cast<std::size_t>(index - 1); }
};

/// Checks that `models` is non-empty and indexed 1..n in order.
void validate_model_set(const std::vector<ModelId>& models);

/// Resolves a model by name or by decimal index; throws ConfigError when absent.
const ModelId& find_model(const std::vector<ModelId>& models, const std::string& key);

/// Score = energy * (1 - confidence). Lower is better.
double compute_score(double energy, double confidence);

}  // namespace ecoswitch
