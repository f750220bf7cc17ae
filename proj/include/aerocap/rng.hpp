#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aerocap {

/// Finalizer from splitmix64; used to derive well-separated stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named sub-streams hanging off one master seed so components can be
/// re-seeded independently (dispersions, atmospheres, training, ...).
enum class SeedStream : std::uint64_t {
    Dispersion = 0x1f3a5c7e90b2d4f6ULL,
    Atmosphere = 0x2b4d6f8a1c3e5071ULL,
    TrainInit = 0x3c5e70a2b4d6f819ULL,
    TrainShuffle = 0x4d6f81a3c5e7092bULL,
    TrainNoise = 0x5e7092b4d6f81a3cULL,
    TrainGmm = 0x6f81a3c5e7092b4dULL,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                 std::uint64_t index = 0) {
    return mix64(mix64(master ^ static_cast<std::uint64_t>(stream)) +
                 index * 0x9e3779b97f4a7c15ULL);
}

/// Deterministic random stream. The engine (mt19937_64) is fully specified by
/// the standard; the variate transforms below are spelled out here instead of
/// using std distributions, whose sequences are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (no cached spare; two uniforms per draw).
    double gaussian() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    /// Uniform integer in [lo, hi], inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        return lo + engine_() % span;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace aerocap
