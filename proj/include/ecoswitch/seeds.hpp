#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace ecoswitch {

/// One round of the SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a, used to turn component tags into seed material.
constexpr std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Splits a base seed into an independent sub-seed per named component.
///
/// sub_seed(seed, tag) = mix64(seed ^ mix64(fnv1a(tag))). Streams keyed by
/// different tags never depend on each other, so adding a policy to a
/// comparison leaves every other policy's stream untouched.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::string_view tag) {
    return mix64(seed ^ mix64(hash_tag(tag)));
}

/// Counter-based seed for a (stream, a, b) triple.
constexpr std::uint64_t counter_seed(std::uint64_t stream, std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(stream ^ mix64(a)) ^ b);
}

/// Small UniformRandomBitGenerator over SplitMix64; cheap to construct per sample.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace ecoswitch
