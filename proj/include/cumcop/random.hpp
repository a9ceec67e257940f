#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace cumcop {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to turn (seed, index, ...) tuples into
/// statistically unrelated stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for an independent substream identified by `path`. Replicate b of a
/// bootstrap seeded with s uses derive_seed(s, {b}), so the stream never
/// depends on which worker happens to run it.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed);
    for (auto p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Engine(seq);
}

/// Uniform draw on the open interval (0,1) with 53 random bits.
inline double open_uniform(Engine& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard exponential via inversion; never returns 0 or infinity.
inline double std_exponential(Engine& g) {
    return -std::log(open_uniform(g));
}

/// Uniform integer in [0, bound) by rejection; unlike std::uniform_int_distribution
/// the output sequence is the same on every standard library.
inline std::uint64_t bounded(Engine& g, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % bound;
}

/// Fisher-Yates shuffle of [first, last) with a portable draw sequence.
template <class It>
void portable_shuffle(It first, It last, Engine& g) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = bounded(g, i);
        std::swap(first[i - 1], first[j]);
    }
}

}  // namespace cumcop
