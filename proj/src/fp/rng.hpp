#pragma once

#include <cstdint>
#include <random>

namespace fp {

// SplitMix64 step, used to derive independent sub-stream seeds. Every unit of
// parallel work (tree, fold, record) gets its own generator seeded through
// this mix so results do not depend on scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(seed, stream)); }

inline double uniform01(Rng& rng) {
    // 53-bit uniform in [0,1)
    return double(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n)
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(rng);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

}  // namespace fp
