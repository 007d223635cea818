#pragma once

#include <cmath>
#include <cstdint>

namespace geocox {

/// SplitMix64: counter-based generator (the output is a bijective hash of an
/// incrementing counter). Used for all simulation draws so that substreams
/// can be derived per replicate and results never depend on scheduling.
/// Distribution transforms are hand-rolled because the standard library's
/// <random> distributions are implementation-defined and would break
/// bit-reproducibility.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    /// Independent substream: mixes the base seed and stream index through
    /// two hash rounds before use.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(index + 0xbf58476d1ce4e5b9ULL)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log argument.
    double next_open() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (two uniforms per draw, cosine branch).
    double next_normal() {
        const double u1 = next_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// Uniform integer on [lo, hi], inclusive.
    int next_int(int lo, int hi) {
        const int span = hi - lo + 1;
        int k = static_cast<int>(next_double() * span);
        if (k >= span) k = span - 1;
        return lo + k;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace geocox
