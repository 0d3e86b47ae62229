#pragma once

#include <cmath>
#include <cstdint>

namespace rrreg {

// Pinned generators so that every simulation result is reproducible from
// (algorithm, seed) alone: SplitMix64 for seeding and stream derivation,
// xoshiro256++ for the draws, Box-Muller for normals.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    /// Deterministic substream `index` of the stream identified by `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed;
        const std::uint64_t a = splitmix64_next(sm);
        std::uint64_t mix = a ^ (0x9E3779B97F4A7C15ULL * (index + 1));
        return Rng(splitmix64_next(mix));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform draw on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Box-Muller; the paired deviate is discarded to keep the stream
    /// position independent of call parity.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// Normal truncated to [a, b] by rejection.
    double truncated_normal(double mu, double sigma, double a, double b) {
        for (;;) {
            const double x = normal(mu, sigma);
            if (x >= a && x <= b) return x;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace rrreg
