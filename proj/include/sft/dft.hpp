#pragma once

// Discrete Fourier transforms of arbitrary length.
//
// Convention: dft(v)(k) = (1/m) * sum_j v(j) * exp(-2*pi*i*j*k/m).
// Power-of-two lengths run an iterative radix-2 transform; every other length
// runs the chirp factorization jk = (j^2 + k^2 - (k-j)^2)/2, which turns the
// transform into a circular convolution of length 2^ceil(log2(2m-1)) and costs
// O(m log m) for any m. A direct O(m^2) evaluation is kept as the correctness
// oracle. Plans (twiddles, chirp spectra) are cached per length in
// thread-local storage; clear_dft_plans() drops them between experiment
// points to bound memory.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sft/numtheory.hpp"

namespace sft {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

struct Pow2Plan {
    std::size_t m = 0;
    std::vector<cplx> twiddle;        // exp(-2*pi*i*j/m), j in [0, m/2)
    std::vector<std::uint32_t> brev;  // bit-reversal permutation

    explicit Pow2Plan(std::size_t len) : m(len) {
        twiddle.resize(m / 2);
        for (std::size_t j = 0; j < m / 2; ++j) {
            const double a = -two_pi * static_cast<double>(j) / static_cast<double>(m);
            twiddle[j] = {std::cos(a), std::sin(a)};
        }
        brev.resize(m);
        std::uint32_t bits = 0;
        while ((std::size_t{1} << bits) < m) ++bits;
        for (std::size_t i = 0; i < m; ++i) {
            std::uint32_t r = 0;
            for (std::uint32_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::uint32_t{1} << (bits - 1 - b);
            brev[i] = r;
        }
    }

    // In-place forward transform, unnormalized.
    void run(cplx* data) const {
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = brev[i];
            if (i < j) std::swap(data[i], data[j]);
        }
        for (std::size_t len = 2; len <= m; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = m / len;
            for (std::size_t start = 0; start < m; start += len) {
                const cplx* w = twiddle.data();
                for (std::size_t j = 0; j < half; ++j, w += step) {
                    const cplx odd = data[start + j + half] * *w;
                    const cplx even = data[start + j];
                    data[start + j] = even + odd;
                    data[start + j + half] = even - odd;
                }
            }
        }
    }
};

struct ChirpPlan {
    std::size_t m = 0;
    std::size_t conv_len = 0;         // smallest power of two >= 2m-1
    std::vector<cplx> chirp;          // exp(-pi*i*j^2/m), j in [0, m)
    std::vector<cplx> chirp_spectrum; // forward transform of the symmetric inverse chirp
    std::shared_ptr<const Pow2Plan> core;

    ChirpPlan(std::size_t len, std::shared_ptr<const Pow2Plan> pow2) : m(len), core(std::move(pow2)) {
        conv_len = core->m;
        chirp.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            // j^2 mod 2m keeps the phase argument small and exact.
            const std::uint64_t q = (static_cast<std::uint64_t>(j) * j) % (2 * m);
            const double a = -detail::two_pi * 0.5 * static_cast<double>(q) / static_cast<double>(m);
            chirp[j] = {std::cos(a), std::sin(a)};
        }
        std::vector<cplx> b(conv_len, cplx{0.0, 0.0});
        b[0] = std::conj(chirp[0]);
        for (std::size_t j = 1; j < m; ++j) {
            b[j] = std::conj(chirp[j]);
            b[conv_len - j] = std::conj(chirp[j]);
        }
        core->run(b.data());
        chirp_spectrum = std::move(b);
    }
};

struct PlanCache {
    std::unordered_map<std::size_t, std::shared_ptr<const Pow2Plan>> pow2;
    std::unordered_map<std::size_t, std::shared_ptr<const ChirpPlan>> chirp;
    std::vector<cplx> scratch;

    std::shared_ptr<const Pow2Plan> pow2_plan(std::size_t m) {
        auto it = pow2.find(m);
        if (it != pow2.end()) return it->second;
        auto plan = std::make_shared<const Pow2Plan>(m);
        pow2.emplace(m, plan);
        return plan;
    }

    std::shared_ptr<const ChirpPlan> chirp_plan(std::size_t m) {
        auto it = chirp.find(m);
        if (it != chirp.end()) return it->second;
        std::size_t conv = 1;
        while (conv < 2 * m - 1) conv <<= 1;
        auto plan = std::make_shared<const ChirpPlan>(m, pow2_plan(conv));
        chirp.emplace(m, plan);
        return plan;
    }
};

inline PlanCache& plan_cache() {
    thread_local PlanCache cache;
    return cache;
}

// Unnormalized forward transform of arbitrary length, in place.
inline void fft_unnormalized(std::vector<cplx>& data) {
    const std::size_t m = data.size();
    if (m <= 1) return;
    auto& cache = plan_cache();
    if (is_pow2(m)) {
        cache.pow2_plan(m)->run(data.data());
        return;
    }
    const auto plan = cache.chirp_plan(m);
    const std::size_t cl = plan->conv_len;
    auto& a = cache.scratch;
    a.assign(cl, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < m; ++j) a[j] = data[j] * plan->chirp[j];
    plan->core->run(a.data());
    for (std::size_t j = 0; j < cl; ++j) a[j] *= plan->chirp_spectrum[j];
    // Inverse convolution transform via conjugation, including the 1/conv_len scale.
    for (auto& z : a) z = std::conj(z);
    plan->core->run(a.data());
    const double inv = 1.0 / static_cast<double>(cl);
    for (std::size_t k = 0; k < m; ++k)
        data[k] = std::conj(a[k]) * inv * plan->chirp[k];
}

}  // namespace detail

/// Drop all cached transform plans (bounds memory across experiment points).
inline void clear_dft_plans() {
    auto& cache = detail::plan_cache();
    cache.pow2.clear();
    cache.chirp.clear();
    cache.scratch.clear();
    cache.scratch.shrink_to_fit();
}

/// Normalized forward transform: X(k) = (1/m) sum_j v(j) e^{-2 pi i j k / m}.
inline std::vector<cplx> dft(std::span<const cplx> v) {
    std::vector<cplx> out(v.begin(), v.end());
    if (out.empty()) throw std::invalid_argument("dft: empty input");
    detail::fft_unnormalized(out);
    const double inv = 1.0 / static_cast<double>(out.size());
    for (auto& z : out) z *= inv;
    return out;
}

/// Direct O(m^2) evaluation of the same transform; correctness oracle.
inline std::vector<cplx> dft_direct(std::span<const cplx> v) {
    const std::size_t m = v.size();
    if (m == 0) throw std::invalid_argument("dft_direct: empty input");
    std::vector<cplx> roots(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double a = -detail::two_pi * static_cast<double>(j) / static_cast<double>(m);
        roots[j] = {std::cos(a), std::sin(a)};
    }
    std::vector<cplx> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < m; ++j) acc += v[j] * roots[(j * k) % m];
        out[k] = acc / static_cast<double>(m);
    }
    return out;
}

/// Unnormalized inverse: x(j) = sum_k X(k) e^{+2 pi i j k / m}, the exact
/// inverse of dft(). Used to synthesize time samples from aliased spectra.
inline std::vector<cplx> idft_unnormalized(std::span<const cplx> v) {
    std::vector<cplx> out(v.begin(), v.end());
    if (out.empty()) throw std::invalid_argument("idft_unnormalized: empty input");
    for (auto& z : out) z = std::conj(z);
    detail::fft_unnormalized(out);
    for (auto& z : out) z = std::conj(z);
    return out;
}

}  // namespace sft
