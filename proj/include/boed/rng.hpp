#pragma once

#include <cstdint>
#include <random>

namespace boed {

/// Pseudo-random engine used throughout. Seeded only through derive_seed so
/// that no global RNG state exists.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based seed splitting. A child seed depends only on the parent seed,
 * the stream tag and the counter, never on how many numbers were consumed
 * elsewhere, so results do not depend on evaluation order or thread count.
 */
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream,
                                    std::uint64_t counter = 0) noexcept {
    return mix64(parent ^ mix64(stream * 0xD1B54A32D192ED03ULL + mix64(counter)));
}

/// Stream tags for the per-draw sub-streams of a Monte Carlo draw.
namespace stream {
inline constexpr std::uint64_t draw = 1;
inline constexpr std::uint64_t params = 2;
inline constexpr std::uint64_t data = 3;
inline constexpr std::uint64_t mask_onset = 4;
inline constexpr std::uint64_t mask_length = 5;
inline constexpr std::uint64_t contamination = 6;
inline constexpr std::uint64_t training = 7;
inline constexpr std::uint64_t detector = 8;
inline constexpr std::uint64_t start = 9;
inline constexpr std::uint64_t emulate = 10;
inline constexpr std::uint64_t accept = 11;
inline constexpr std::uint64_t final_eval = 12;
inline constexpr std::uint64_t network = 13;
}  // namespace stream

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace boed
