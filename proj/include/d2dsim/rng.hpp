#pragma once

#include <cstdint>

namespace d2dsim {

// Counter-based random stream. Every draw is a pure function of
// (seed, slot, purpose), so adding a new purpose tag later never
// perturbs the draws of existing purposes, and simulations replay
// bit-for-bit on any platform.
enum class DrawPurpose : std::uint64_t {
    d2d_access = 1,
};

// SplitMix64 finalizer; full-period bijective mixer.
constexpr std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t slot, DrawPurpose purpose) {
    std::uint64_t h = mix_u64(seed);
    h = mix_u64(h ^ slot);
    h = mix_u64(h ^ static_cast<std::uint64_t>(purpose));
    return h;
}

// Uniform in [0, 1) with 53 significant bits.
constexpr double draw_uniform(std::uint64_t seed, std::uint64_t slot, DrawPurpose purpose) {
    return static_cast<double>(draw_u64(seed, slot, purpose) >> 11) * 0x1.0p-53;
}

} // namespace d2dsim
