#pragma once

#include <cstdint>
#include <random>

namespace wec::util {

/// Uniform integer in [0, bound) drawn from a 64-bit Mersenne Twister by
/// rejection. Unlike std::uniform_int_distribution the result sequence is
/// identical across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t bound) {
    if (bound <= 1)
        return 0;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw = rng();
    while (draw >= limit)
        draw = rng();
    return draw % bound;
}

} // namespace wec::util
