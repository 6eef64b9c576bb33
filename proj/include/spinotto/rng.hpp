#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace spinotto {

// Counter-free splitmix64 generator.  Small state, splittable by index, and
// fully deterministic across platforms, which keeps stochastic outputs
// byte-identical for a given seed.  The algorithm name is recorded in sweep
// metadata.
class SplitMix64 {
public:
    static constexpr const char* algorithm = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Exponential waiting time with the given rate (1/ms).
    double next_exponential(double rate_per_ms) {
        if (rate_per_ms <= 0.0)
            return std::numeric_limits<double>::infinity();
        return -std::log1p(-next_unit()) / rate_per_ms;
    }

    // Deterministic per-index substream seed derived from a master seed.
    static std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
        SplitMix64 g(master ^ (0x9e3779b97f4a7c15ull * (index + 1)));
        g.next_u64();
        return g.next_u64();
    }

private:
    std::uint64_t state_;
};

} // namespace spinotto
