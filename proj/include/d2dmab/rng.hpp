#pragma once

// Seeded pseudo-random streams for the simulator.
//
// Two access patterns:
//  - Stream: a sequential splitmix64 generator, used where a fixed draw
//    order is natural (topology geometry, shadowing, policy randomness).
//  - at(seed, ...): counter-based draws that are a pure function of their
//    arguments, used for fast fading so the gain of (subframe, link) never
//    depends on evaluation order.
//
// Child seeds are derived with split(parent, tag[, index]); tags are FNV-1a
// hashes of the stream purpose ("fading", "policy", ...) so every stream in
// an experiment traces back to one master seed.
//
// All conversions from bits to doubles are spelled out here instead of using
// <random> distributions, so identical seeds give identical draws on every
// platform.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace d2dmab::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t avalanche(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// FNV-1a over a purpose name; used to label seed-tree branches.
constexpr std::uint64_t tag(std::string_view name) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char ch : name) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
    }
    return h;
}

constexpr std::uint64_t split(std::uint64_t parent, std::uint64_t stream_tag) {
    return avalanche((parent + kGolden) ^ (stream_tag * 0xD6E8FEB86659FD93ull));
}

constexpr std::uint64_t split(std::uint64_t parent, std::uint64_t stream_tag,
                              std::uint64_t index) {
    return avalanche(split(parent, stream_tag) + (index + 1) * kGolden);
}

// (0,1): never 0 or 1, so -log stays finite and positive.
constexpr double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// [0,1)
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based draws: pure functions of (seed, counter[, subcounter]).
inline std::uint64_t bits_at(std::uint64_t seed, std::uint64_t counter) {
    return avalanche((seed + kGolden) ^ (counter * 0xD1B54A32D192ED03ull));
}

// Unit-mean exponential; strictly positive and finite.
inline double exponential_at(std::uint64_t seed, std::uint64_t counter) {
    return -std::log(to_open_unit(bits_at(seed, counter)));
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_bits() {
        state_ += kGolden;
        return avalanche(state_);
    }

    double uniform() { return to_unit(next_bits()); }            // [0,1)
    double uniform_open() { return to_open_unit(next_bits()); }  // (0,1)

    double exponential() { return -std::log(uniform_open()); }

    // Standard normal via Box-Muller; one value per call.
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n). n must be >= 1.
    std::uint32_t uniform_int(std::uint32_t n) {
        const auto v = static_cast<std::uint32_t>(uniform() * n);
        return v < n ? v : n - 1;
    }

private:
    std::uint64_t state_;
};

// Stream purposes used by the simulator's seed tree.
inline constexpr std::uint64_t kTagTopology  = tag("topology");
inline constexpr std::uint64_t kTagShadowing = tag("shadowing");
inline constexpr std::uint64_t kTagFading    = tag("fading");
inline constexpr std::uint64_t kTagPolicy    = tag("policy");
inline constexpr std::uint64_t kTagOracle    = tag("oracle");
inline constexpr std::uint64_t kTagRun       = tag("run");

}  // namespace d2dmab::rng
