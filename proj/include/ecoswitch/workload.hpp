#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <vector>

namespace ecoswitch {

/// Request arrival timestamps in seconds, non-decreasing, first arrival at t = 0.
struct ArrivalTrace {
    std::vector<double> times;

    std::size_t size() const { return times.size(); }
};

/// One ASCII decimal timestamp per line. Throws ParseError (with line) on decreasing input.
ArrivalTrace load_arrival_trace(const std::filesystem::path& path);

/// Poisson arrivals: n timestamps with exponential gaps of mean 1/rate, the first at t = 0.
ArrivalTrace synth_arrivals(std::size_t n, double rate, std::uint64_t seed);

/// FIFO buffer of pending request ids. Bounded queues drop the newest arrival when full.
class RequestQueue {
public:
    RequestQueue() = default;
    explicit RequestQueue(std::optional<std::size_t> capacity);

    /// Returns false (and counts a drop) when the queue is full.
    bool enqueue(std::uint64_t request_id);
    std::optional<std::uint64_t> dequeue();

    std::size_t size() const { return pending_.size(); }
    bool empty() const { return pending_.empty(); }
    std::uint64_t drops() const { return drops_; }
    std::optional<std::size_t> capacity() const { return capacity_; }

private:
    std::deque<std::uint64_t> pending_;
    std::optional<std::size_t> capacity_;
    std::uint64_t drops_ = 0;
};

}  // namespace ecoswitch
