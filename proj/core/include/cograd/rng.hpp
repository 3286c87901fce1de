#pragma once

#include <cstdint>
#include <random>

namespace cograd {

/// SplitMix64 finalizer. Used to derive independent streams from
/// (base seed, counter) pairs so changing the trial count never
/// reshuffles the seeds of earlier trials.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream seed for sub-component `index` of the run seeded by `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x51ed270b8a9c1a1bULL));
}

/// Three-level derivation (e.g. trial / step / channel).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(base, a), b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace cograd
