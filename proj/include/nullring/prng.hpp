#pragma once

#include <cstdint>

#include <gmpxx.h>

#include "nullring/errors.hpp"

namespace nullring {

/// SplitMix64. Fixed, platform-independent output so that seeded runs are
/// reproducible byte for byte.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, bound) by rejection; bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform signed draw from [-t, t].
    std::int64_t next_digit(std::uint64_t t) {
        return static_cast<std::int64_t>(next_below(2 * t + 1)) -
               static_cast<std::int64_t>(t);
    }

private:
    std::uint64_t state_;
};

/// Stateless digit draw: the i-th digit of a seeded stream is a pure
/// function of (seed, i), so streams can be sampled at any index.
inline std::int64_t indexed_digit(std::uint64_t seed, std::uint64_t index,
                                  std::uint64_t t) {
    SplitMix64 rng(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
    return rng.next_digit(t);
}

} // namespace nullring
