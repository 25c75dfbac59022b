#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mfl::rng {

// splitmix64 finalizer
constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) { return mix(a ^ mix(b)); }

/// Stable 64-bit hash of a label, used to derive per-check substreams.
constexpr std::uint64_t hash_label(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix(h);
}

/// Uniform in (0, 1), never exactly 0 or 1.
inline double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal indexed by (stream, counter); Box–Muller on two hashed uniforms.
inline double counter_normal(std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t base = combine(stream, counter);
    const double u1 = to_open_unit(mix(base));
    const double u2 = to_open_unit(mix(base ^ 0xd1b54a32d192ed03ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mfl::rng
