#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

// Seeding and sampling primitives.
//
// Everything downstream (sample generation, permutation resampling,
// Monte-Carlo draws) derives its randomness from a 64-bit seed through the
// functions in this file. The engine is std::mt19937_64 (the bit stream is
// pinned by the standard); the uniform/normal/Laplace transforms are written
// out here instead of using std::*_distribution so that results do not
// depend on the standard library implementation.
//
// Seed derivation: sub-streams are built with derive_seed(master, a, b, ...)
// which folds each index into the state with the SplitMix64 finalizer. Never
// reuse one derived seed for two purposes.

namespace hdtest {

inline constexpr std::uint64_t kSeedGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master) { return mix64(master + kSeedGolden); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, Rest... rest) {
    return derive_seed(mix64(master + kSeedGolden * (index + 1)), rest...);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed + kSeedGolden)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; draws come in cached pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // Guard against log(0).
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Zero-mean Laplace with scale b (variance 2 b^2).
    double laplace(double scale) {
        const double u = uniform() - 0.5;
        const double s = (u < 0.0) ? -1.0 : 1.0;
        return -scale * s * std::log1p(-2.0 * std::fabs(u));
    }

    // Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % bound;
    }

    // Fisher-Yates; explicit so shuffles are engine-deterministic.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Neumaier-compensated accumulator; pairwise statistic sums use this.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace hdtest
