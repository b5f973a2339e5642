#include "ecoswitch/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ecoswitch/errors.hpp"

namespace ecoswitch {

void validate_model_set(const std::vector<ModelId>& models) {
    if (models.empty()) throw ConfigError("at least one model is required");
    for (std::size_t j = 0; j < models.size(); ++j) {
        if (models[j].index != static_cast<int>(j + 1)) {
            throw ConfigError("model indices must be dense 1..n in order; got " +
                              std::to_string(models[j].index) + " at position " +
                              std::to_string(j + 1));
        }
        if (models[j].name.empty()) throw ConfigError("model names must be non-empty");
        for (std::size_t i = 0; i < j; ++i) {
            if (models[i].name == models[j].name) {
                throw ConfigError("duplicate model name '" + models[j].name + "'");
            }
        }
    }
}

const ModelId& find_model(const std::vector<ModelId>& models, const std::string& key) {
    auto it = std::find_if(models.begin(), models.end(),
                           [&](const ModelId& m) { return m.name == key; });
    if (it != models.end()) return *it;
    int index = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
    if (ec == std::errc{} && ptr == key.data() + key.size() && index >= 1 &&
        index <= static_cast<int>(models.size())) {
        return models[static_cast<std::size_t>(index - 1)];
    }
    throw ConfigError("unknown model '" + key + "'");
}

double compute_score(double energy, double confidence) {
    if (!(energy >= 0.0) || !std::isfinite(energy)) {
        throw ValidationError("score needs energy >= 0, got " + std::to_string(energy));
    }
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw ValidationError("score needs confidence in [0,1], got " + std::to_string(confidence));
    }
    return energy * (1.0 - confidence);
}

}  // namespace ecoswitch
