#pragma once

#include <cstdint>
#include <random>

#include "sngeo/common.hpp"

namespace sngeo {

// Reproducibility contract: every random draw in the library flows from a
// (master seed, stream index) pair through the samplers below. std::mt19937_64
// is fully specified by the standard; the distribution samplers are our own
// because the std:: distribution algorithms are implementation-defined and
// would break bit-for-bit reproducibility across toolchains.

/// Identifies one independent random stream: replicate r of an experiment uses
/// stream index r, so any single replicate can be reproduced in isolation.
struct SeedStream {
    std::uint64_t master = 0;
    std::uint64_t index = 0;

    /// Derived stream for retry attempt `attempt` (degenerate-configuration
    /// redraws). Attempt 0 is the stream itself.
    SeedStream retry(std::uint64_t attempt) const {
        return SeedStream{master, index + (attempt << 40)};
    }
};

// SplitMix64 step; the standard finalizer from Vigna's splitmix64.c.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream derivation (documented, stable): the mt19937_64 engine is seeded
/// with the second SplitMix64 output of the counter value master XOR
/// (index * odd constant). Distinct indices give independent streams.
inline std::mt19937_64 make_engine(const SeedStream& s) {
    std::uint64_t ctr = s.master ^ (s.index * 0xD1342543DE82EF95ULL);
    splitmix64(ctr);
    return std::mt19937_64(splitmix64(ctr));
}

/// Uniform double in [0,1) with 53 random mantissa bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform double in [a,b).
inline double uniform_in(std::mt19937_64& g, double a, double b) {
    return a + (b - a) * uniform01(g);
}

/// Standard normal via Box-Muller (both values used in sequence).
class NormalSampler {
  public:
    double operator()(std::mt19937_64& g) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(g);
        while (u1 == 0.0) u1 = uniform01(g);
        const double u2 = uniform01(g);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Poisson sampler, portable and deterministic. Knuth's product method below
/// mean 30, Hormann's PTRS transformed rejection above.
std::uint64_t sample_poisson_count(std::mt19937_64& g, double mean);

}  // namespace sngeo
