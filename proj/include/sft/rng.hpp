#pragma once

// Deterministic random number generation (xoshiro256++ seeded via splitmix64).
//
// The standard <random> distributions are implementation-defined, so two
// toolchains can disagree on the exact stream. Experiment records here must be
// reproducible byte for byte under a fixed seed, hence a self-contained
// generator with fixed algorithms for uniform and Gaussian draws.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace sft {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Combine key parts into one 64-bit substream key (order-sensitive).
inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = a;
    std::uint64_t k = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL;
    k ^= splitmix64(s);
    s ^= c + 0xc2b2ae3d27d4eb4fULL;
    k ^= splitmix64(s);
    return k;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1): 53-bit mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] inclusive; requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
        // Rejection sampling for an unbiased draw.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Standard normal via Box-Muller (two uniforms per pair, cached second value).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // guard log(0)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex Gaussian: independent N(0,1) real and imaginary parts.
    std::complex<double> complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    /// e^{2*pi*i*theta} with theta uniform in [0,1).
    std::complex<double> unit_phase() {
        const double a = 6.283185307179586476925286766559 * uniform();
        return {std::cos(a), std::sin(a)};
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sft
