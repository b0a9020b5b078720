#pragma once

#include <cstdint>
#include <random>

namespace cellcap {

using Rng = std::mt19937_64;

/// Independent purposes drawn from the same (seed, index) pair.
enum class Stream : std::uint64_t {
    geometry = 1,
    slots = 2,
    auxiliary = 3,
};

/// Derives an independent generator for realization `index` of a run seeded
/// with `seed`. Streams depend only on (seed, index, purpose), so a
/// realization draws the same numbers whether it runs first, last, or on
/// another thread.
Rng make_stream(std::uint64_t seed, std::uint64_t index, Stream purpose);

/// SplitMix64 finaliser; exposed for tests and for deriving child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace cellcap
