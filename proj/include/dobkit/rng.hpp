#pragma once

#include <cstdint>

namespace dobkit {

/// Minimal deterministic RNG (splitmix64). Chosen over <random> engines so
/// that streams are bit-identical across standard libraries; distribution
/// code in libstdc++/libc++ is not portable bit-for-bit.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) { next(); }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * u01(); }
};

}  // namespace dobkit
