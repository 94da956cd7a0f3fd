#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace emcal {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a sequence of tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = mix64(base);
    for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
    return s;
}

using Rng = std::mt19937_64;

// Stream tags.
inline constexpr std::uint64_t kTagAxisX = 0x58;
inline constexpr std::uint64_t kTagAxisY = 0x59;
inline constexpr std::uint64_t kTagGamma = 0x67616d6d61;
inline constexpr std::uint64_t kTagPair = 0x70616972;

}  // namespace emcal
