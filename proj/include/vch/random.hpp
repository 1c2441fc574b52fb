#pragma once

#include <cstdint>
#include <random>

#include "grid.hpp"

namespace vch {

// Seeded RNG wrapper. The [0,1) mapping is written out explicitly (instead of
// uniform_real_distribution) so streams are reproducible bit for bit across
// standard library implementations.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform01() {
        return static_cast<double>(eng() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
};

inline Field random_field(const Grid& g, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Field f(g);
    for (auto& x : f.v) x = rng.uniform(lo, hi);
    return f;
}

} // namespace vch
