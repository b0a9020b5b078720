#include "cellcap/rng.hpp"

namespace cellcap {

Rng make_stream(std::uint64_t seed, std::uint64_t index, Stream purpose)
{
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ index);
    const std::uint64_t c = splitmix64(b ^ (static_cast<std::uint64_t>(purpose) * 0x9e3779b97f4a7c15ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return Rng(seq);
}

} // namespace cellcap
