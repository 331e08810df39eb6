#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace medsynth {

// Deterministic seeded random source built on the splitmix64 generator.
//
// Every draw is a pure function of the 64-bit state, so identical seeds
// reproduce identical streams. The raw integer stream is exactly portable;
// the floating-point transforms below are deterministic for a given libm.
//
// Normal draws use Box-Muller over two uniforms. Each uniform pair yields
// two normals: the cosine branch is returned first and the sine branch is
// cached and returned by the next call.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in [0, n) via 128-bit multiply-shift.
    std::uint64_t uniform_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double standard_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]: keeps log(u1) finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

    std::vector<double> standard_normal_vector(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = standard_normal();
        return out;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Index draw proportional to non-negative weights (need not be normalized).
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform() * total;
        double cum = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            cum += weights[i];
            if (u < cum) return i;
        }
        return weights.size() - 1;  // u landed on accumulated rounding slack
    }

    // Seeded Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(idx[i - 1], idx[j]);
        }
        return idx;
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

inline RandomSource seeded_rng(std::uint64_t seed) { return RandomSource(seed); }

// Deterministic child seed from a master seed and a label: FNV-1a over the
// label bytes, XORed into the master, then scrambled once with the
// splitmix64 finalizer. Distinct labels collide only with ~2^-64 probability.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master_seed ^ h;
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace medsynth
