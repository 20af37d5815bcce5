#pragma once

// Portable random streams.
//
// Every stream is a std::mt19937_64 seeded with a single 64-bit value; its
// output sequence is fixed by the C++ standard. Distributions are NOT taken
// from <random> (their algorithms are implementation-defined); the helpers
// below define them exactly:
//
//   uniform01(r)        = (r() >> 11) * 2^-53
//   uniform_index(r, k) = Lemire's multiply-shift with rejection, exact on [0, k)
//
// Substreams are split by seed derivation: derive_seed(master, i) applies the
// SplitMix64 finalizer to master and to i, so stream i of master is
// independent of how many other streams exist or which worker consumes it.

#include <cstdint>
#include <random>

namespace fixedform {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Uniform integer in [0, bound); bound must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    unsigned __int128 product = static_cast<unsigned __int128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<unsigned __int128>(rng()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace fixedform
