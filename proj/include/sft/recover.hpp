#pragma once

// Sparse recovery pipelines. A prime scheme dictates a family of short
// equispaced sample grids; this header acquires those grids from a signal
// model, slices each grid's DFT into residue-restricted columns, runs the
// column solver, and aggregates candidates across hash moduli into the final
// sparse estimate.
//
// Acquisition modes:
//  - sample_dft: evaluate the signal pointwise on each grid, then transform.
//    O(|support| * m) per grid; the reference for what honest sampling sees.
//  - synth_dft: synthesize the same samples as inverse-DFT of the aliased
//    spectrum, then transform. Mathematically identical samples at
//    O(m log m); this is the pipeline the benchmarks time.
//  - alias_direct: take the aliased spectrum as the transform directly,
//    with noise added per frequency bin. Skips the time domain entirely;
//    used by quality experiments where sampling cost is not being measured.
//
// Noise is keyed by (noise_seed, grid length), so every acquisition of the
// same grid within a run sees identical noise and reruns reproduce byte-for-
// byte, regardless of batching or evaluation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sft/column_solver.hpp"
#include "sft/dft.hpp"
#include "sft/numtheory.hpp"
#include "sft/rng.hpp"
#include "sft/spectrum.hpp"

namespace sft {

enum class AcquisitionMode { sample_dft, synth_dft, alias_direct };

/// The signal under recovery: its true sparse spectrum plus the noise level
/// applied during acquisition. snr_db = +infinity means noiseless.
struct SignalModel {
    SparseSpectrum spectrum;
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t noise_seed = 0;

    bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
};

struct RecoverOptions {
    AcquisitionMode acquisition = AcquisitionMode::synth_dft;
    /// Cap on transient column storage; grids are re-acquired per batch when
    /// a modulus's columns exceed it. Noise keying makes batching invisible.
    std::size_t memory_budget_bytes = std::size_t{256} << 20;
};

struct RecoveryDiagnostics {
    i64 samples_used = 0;    // nominal acquisition cost: sum of grid lengths
    i64 columns_solved = 0;  // residue-class columns actually processed
    std::map<int, i64> vote_histogram;  // vote count -> accepted candidates
};

struct RecoveryResult {
    SparseSpectrum estimate;
    RecoveryDiagnostics diag;
};

/// Residue-restricted slice of a length r*u transform: entry j is the bin of
/// `full` congruent to nu modulo u and to j modulo r. Requires gcd(r, u) = 1.
inline std::vector<cplx> extract_residue_dft(std::span<const cplx> full, i64 nu, i64 r, i64 u) {
    if (r < 1 || u < 1 || nu < 0 || nu >= u) throw std::invalid_argument("extract_residue_dft: bad nu/r/u");
    if (full.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(u))
        throw std::invalid_argument("extract_residue_dft: transform length is not r*u");
    if (gcd_i64(r, u) != 1) throw std::invalid_argument("extract_residue_dft: r and u must be coprime");
    const i64 w = mod_inverse(u, r);
    std::vector<cplx> out(static_cast<std::size_t>(r));
    i64 q = mod_floor(-nu * w, r);  // ((j - nu) * w) mod r, walked incrementally
    for (i64 j = 0; j < r; ++j) {
        out[static_cast<std::size_t>(j)] = full[static_cast<std::size_t>(q * u + nu)];
        q += w;
        if (q >= r) q -= r;
    }
    return out;
}

namespace detail {

/// Sorted sample of `count` distinct indices from [0, n).
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, Rng& rng) {
    if (count < 1 || count > n) throw std::invalid_argument("sample_indices: count out of range");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<i64>(i), static_cast<i64>(n) - 1));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Acquire the full length-m transform of the signal under one mode.
inline std::vector<cplx> full_transform(const SignalModel& signal, i64 m, AcquisitionMode mode) {
    if (mode == AcquisitionMode::alias_direct) {
        std::vector<cplx> f = alias_project(signal.spectrum, m);
        if (!signal.noiseless()) {
            double norm_sq = 0.0;
            for (const auto& z : f) norm_sq += std::norm(z);
            if (norm_sq > 0.0) {
                // Per-bin level chosen so the expected noise-to-signal energy
                // ratio matches what time-domain noise at this SNR produces
                // after the normalized transform.
                const double sigma = std::sqrt(norm_sq) * std::pow(10.0, -signal.snr_db / 20.0) /
                                     std::sqrt(static_cast<double>(m));
                Rng noise_rng(mix_key(signal.noise_seed, static_cast<std::uint64_t>(m)));
                const double half = sigma / std::sqrt(2.0);
                for (auto& z : f) z += noise_rng.complex_gaussian() * half;
            }
        }
        return f;
    }
    std::vector<cplx> samples = mode == AcquisitionMode::sample_dft
                                    ? sample_vector(signal.spectrum, m)
                                    : idft_unnormalized(alias_project(signal.spectrum, m));
    if (!signal.noiseless()) {
        Rng noise_rng(mix_key(signal.noise_seed, static_cast<std::uint64_t>(m)));
        samples = add_noise(std::move(samples), signal.snr_db, noise_rng);
    }
    return dft(samples);
}

/// Grid length of level l (0 = vote prime alone) for vote prime s under hash
/// modulus u.
inline i64 level_length(i64 s, std::span<const i64> t, std::size_t l) {
    return l == 0 ? s : s * t[l - 1];
}

}  // namespace detail

/// Core pipeline over chosen vote-prime and hash-modulus index subsets.
/// Deterministic callers pass the full index ranges; randomized callers pass
/// sampled subsets. Vote majorities are strict relative to the subset sizes.
inline RecoveryResult recover_with_subsets(const SignalModel& signal, const PrimeScheme& scheme,
                                           std::span<const std::size_t> vote_idx,
                                           std::span<const std::size_t> modulus_idx,
                                           const RecoverOptions& opts = {}) {
    scheme.validate();
    if (vote_idx.empty() || modulus_idx.empty())
        throw std::invalid_argument("recover_with_subsets: empty index subset");
    const std::size_t L = scheme.crt_primes.size();
    const std::size_t K_used = vote_idx.size();
    const std::size_t M_used = modulus_idx.size();
    const std::size_t sparsity = static_cast<std::size_t>(scheme.column_sparsity());
    const std::size_t keep = 2 * sparsity;
    const EstimationMode est = scheme.mode == SchemeMode::block ? EstimationMode::last_level
                                                                : EstimationMode::all_pairs;

    std::vector<i64> s_used(K_used);
    for (std::size_t kk = 0; kk < K_used; ++kk) s_used[kk] = scheme.vote_primes[vote_idx[kk]];

    // Per-column transform footprint, in complex values, for batching.
    i64 column_bins = 0;
    for (i64 s : s_used)
        for (std::size_t l = 0; l <= L; ++l) column_bins += detail::level_length(s, scheme.crt_primes, l);

    RecoveryResult result;
    result.estimate.N = scheme.N;
    std::map<i64, std::vector<cplx>> per_modulus_estimates;

    const bool direct_columns =
        opts.acquisition == AcquisitionMode::alias_direct && signal.noiseless();

    for (std::size_t mm : modulus_idx) {
        const i64 u = scheme.hash_moduli[mm];
        result.diag.samples_used += column_bins * u;

        // Which residue classes to solve. Noiseless aliased acquisition can
        // skip classes holding no energy: their columns are identically zero
        // and zero columns never produce majority candidates.
        std::vector<i64> classes;
        if (direct_columns) {
            std::vector<i64> c;
            for (const auto& [w, coeff] : signal.spectrum.entries) c.push_back(mod_floor(w, u));
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
            classes = std::move(c);
        } else {
            classes.resize(static_cast<std::size_t>(u));
            for (i64 nu = 0; nu < u; ++nu) classes[static_cast<std::size_t>(nu)] = nu;
        }
        if (classes.empty()) continue;

        // Tones grouped by residue class for direct column synthesis.
        std::map<i64, std::vector<std::pair<i64, cplx>>> tones_by_class;
        if (direct_columns)
            for (const auto& [w, coeff] : signal.spectrum.entries)
                tones_by_class[mod_floor(w, u)].emplace_back(w, coeff);

        const std::size_t batch_cols = std::max<std::size_t>(
            1, opts.memory_budget_bytes / (static_cast<std::size_t>(column_bins) * sizeof(cplx)));

        for (std::size_t begin = 0; begin < classes.size(); begin += batch_cols) {
            const std::size_t end = std::min(classes.size(), begin + batch_cols);
            std::vector<std::vector<std::vector<cplx>>> vecs(end - begin);
            for (auto& v : vecs) v.resize(K_used * (L + 1));

            if (direct_columns) {
                for (std::size_t c = begin; c < end; ++c) {
                    const auto& tones = tones_by_class[classes[c]];
                    auto& column = vecs[c - begin];
                    for (std::size_t kk = 0; kk < K_used; ++kk)
                        for (std::size_t l = 0; l <= L; ++l) {
                            const i64 r = detail::level_length(s_used[kk], scheme.crt_primes, l);
                            auto& v = column[kk * (L + 1) + l];
                            v.assign(static_cast<std::size_t>(r), cplx{0.0, 0.0});
                            for (const auto& [w, coeff] : tones)
                                v[static_cast<std::size_t>(mod_floor(w, r))] += coeff;
                        }
                }
            } else {
                for (std::size_t kk = 0; kk < K_used; ++kk)
                    for (std::size_t l = 0; l <= L; ++l) {
                        const i64 r = detail::level_length(s_used[kk], scheme.crt_primes, l);
                        const std::vector<cplx> full =
                            detail::full_transform(signal, r * u, opts.acquisition);
                        for (std::size_t c = begin; c < end; ++c)
                            vecs[c - begin][kk * (L + 1) + l] =
                                extract_residue_dft(full, classes[c], r, u);
                    }
            }

            for (std::size_t c = begin; c < end; ++c) {
                ColumnView view;
                view.N = scheme.N;
                view.u = u;
                view.nu = classes[c];
                view.s = s_used;
                view.t = scheme.crt_primes;
                view.vecs = &vecs[c - begin];
                ++result.diag.columns_solved;
                for (const Candidate& cand : solve_column(view, sparsity, keep, est)) {
                    ++result.diag.vote_histogram[cand.votes];
                    per_modulus_estimates[cand.freq].push_back(cand.coeff);
                }
            }
        }
    }

    // Cross-modulus aggregation: a frequency must appear under a strict
    // majority of the hash moduli used; its coefficient is the componentwise
    // median of the per-modulus estimates. Exact zeros carry no information
    // and are dropped before the final size cut.
    struct Scored {
        i64 freq;
        cplx coeff;
    };
    std::vector<Scored> accepted;
    std::vector<double> re, im;
    for (auto& [freq, ests] : per_modulus_estimates) {
        if (2 * ests.size() <= M_used) continue;
        re.clear();
        im.clear();
        for (const cplx& e : ests) {
            re.push_back(e.real());
            im.push_back(e.imag());
        }
        const cplx coeff = detail::component_median(re, im);
        if (coeff == cplx{0.0, 0.0}) continue;
        accepted.push_back({freq, coeff});
    }
    std::sort(accepted.begin(), accepted.end(), [](const Scored& a, const Scored& b) {
        const double ma = std::norm(a.coeff);
        const double mb = std::norm(b.coeff);
        if (ma != mb) return ma > mb;
        return a.freq < b.freq;
    });
    const std::size_t cap = static_cast<std::size_t>(scheme.n) * static_cast<std::size_t>(scheme.B);
    if (accepted.size() > cap) accepted.resize(cap);
    for (const Scored& sc : accepted) result.estimate.set(sc.freq, sc.coeff);
    return result;
}

/// Deterministic recovery with every vote prime and hash modulus.
inline RecoveryResult recover(const SignalModel& signal, const PrimeScheme& scheme,
                              const RecoverOptions& opts = {}) {
    std::vector<std::size_t> all_k(scheme.vote_primes.size());
    for (std::size_t i = 0; i < all_k.size(); ++i) all_k[i] = i;
    std::vector<std::size_t> all_m(scheme.hash_moduli.size());
    for (std::size_t i = 0; i < all_m.size(); ++i) all_m[i] = i;
    return recover_with_subsets(signal, scheme, all_k, all_m, opts);
}

/// Randomized block recovery: solve with a uniform random subset of the vote
/// primes; majorities are strict relative to the subset size. subset_size
/// equal to the scheme's full count reproduces deterministic recovery.
inline RecoveryResult recover_block_randomized(const SignalModel& signal, const PrimeScheme& scheme,
                                               std::size_t subset_size, Rng& rng,
                                               const RecoverOptions& opts = {}) {
    if (scheme.mode != SchemeMode::block)
        throw std::invalid_argument("recover_block_randomized: scheme is not a block scheme");
    const std::vector<std::size_t> k_idx =
        detail::sample_indices(scheme.vote_primes.size(), subset_size, rng);
    std::vector<std::size_t> all_m(scheme.hash_moduli.size());
    for (std::size_t i = 0; i < all_m.size(); ++i) all_m[i] = i;
    return recover_with_subsets(signal, scheme, k_idx, all_m, opts);
}

/// Randomized general recovery: solve under a uniform random subset of the
/// hash moduli; the cross-modulus majority is strict relative to the subset.
inline RecoveryResult recover_general_randomized(const SignalModel& signal,
                                                 const PrimeScheme& scheme,
                                                 std::size_t subset_size, Rng& rng,
                                                 const RecoverOptions& opts = {}) {
    if (scheme.mode == SchemeMode::block)
        throw std::invalid_argument("recover_general_randomized: use the block variant");
    std::vector<std::size_t> all_k(scheme.vote_primes.size());
    for (std::size_t i = 0; i < all_k.size(); ++i) all_k[i] = i;
    const std::vector<std::size_t> m_idx =
        detail::sample_indices(scheme.hash_moduli.size(), subset_size, rng);
    return recover_with_subsets(signal, scheme, all_k, m_idx, opts);
}

}  // namespace sft
