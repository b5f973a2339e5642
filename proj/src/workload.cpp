#include "ecoswitch/workload.hpp"

#include <cmath>
#include <string>

#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"
#include "ecoswitch/seeds.hpp"

namespace ecoswitch {

ArrivalTrace load_arrival_trace(const std::filesystem::path& path) {
    auto lines = csv::read_lines(path);
    const std::string where = path.string();
    ArrivalTrace trace;
    trace.times.reserve(lines.size());
    std::size_t last_line = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view text = lines[i];
        while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
        while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
        if (text.empty()) continue;
        const double t = csv::parse_double(text, where, i + 1);
        if (!trace.times.empty() && t < trace.times.back()) {
            throw ParseError(where, i + 1,
                             "timestamp " + std::string(text) + " decreases (previous on line " +
                                 std::to_string(last_line) + ")");
        }
        trace.times.push_back(t);
        last_line = i + 1;
    }
    if (trace.times.empty()) throw ParseError(where, 1, "arrival trace is empty");
    const double origin = trace.times.front();
    for (auto& t : trace.times) t -= origin;
    return trace;
}

ArrivalTrace synth_arrivals(std::size_t n, double rate, std::uint64_t seed) {
    if (n < 1) throw ConfigError("synthetic workload needs n >= 1 requests");
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("arrival rate must be > 0");
    SplitMix64 rng(seed);
    ArrivalTrace trace;
    trace.times.reserve(n);
    double t = 0.0;
    trace.times.push_back(t);
    for (std::size_t i = 1; i < n; ++i) {
        t += -std::log1p(-rng.uniform01()) / rate;
        trace.times.push_back(t);
    }
    return trace;
}

RequestQueue::RequestQueue(std::optional<std::size_t> capacity) : capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) throw ConfigError("queue capacity must be >= 1 when bounded");
}

bool RequestQueue::enqueue(std::uint64_t request_id) {
    if (capacity_ && pending_.size() >= *capacity_) {
        ++drops_;
        return false;
    }
    pending_.push_back(request_id);
    return true;
}

std::optional<std::uint64_t> RequestQueue::dequeue() {
    if (pending_.empty()) return std::nullopt;
    auto id = pending_.front();
    pending_.pop_front();
    return id;
}

}  // namespace ecoswitch
