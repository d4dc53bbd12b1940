#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace agot {

// Deterministic randomness helpers. std::mt19937_64 is fully specified by the
// standard, but the <random> distributions are not, so the transforms below
// are written out explicitly: identical seeds give identical streams on every
// platform and compiler.

// splitmix64 finalizer; used to derive independent seeds from (seed, tag) pairs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1): 53 mantissa bits.
    double next_uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n); n must be positive. Rejection sampling keeps
    // the draw unbiased and implementation independent.
    std::uint64_t next_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    // Standard normal via Box-Muller. One spare value is cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        while (u1 <= 0.0) u1 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::vector<double> normal_vector(std::size_t n, double sigma) {
        std::vector<double> out(n);
        for (auto& v : out) v = sigma * next_normal();
        return out;
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(next_index(i + 1));
            std::swap(items[i], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace agot
