#pragma once

#include <cmath>
#include <cstdint>

namespace lassobounds {

/// Deterministic splittable generator built on splitmix64.
///
/// substream(i) derives an independent stream from (seed, i) alone, so
/// parallel Monte Carlo replicates reproduce bit-identically regardless of
/// scheduling order. All sampling code in this project goes through this
/// class; nothing uses <random> distributions (their output is
/// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(mix(seed)) {}

    /// Independent stream keyed by (original seed, index).
    Rng substream(std::uint64_t index) const {
        Rng r(0);
        r.seed_ = mix(seed_ ^ mix(index + 0x632BE59BD9B4E019ULL));
        r.state_ = mix(r.seed_);
        r.have_spare_ = false;
        return r;
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller; the spare is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Standard Laplace (density exp(-|x|)/2).
    double laplace() {
        const double u = uniform() - 0.5;
        const double a = std::log(1.0 - 2.0 * std::abs(u));
        return u >= 0.0 ? -a : a;
    }

    /// Uniform integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lassobounds
