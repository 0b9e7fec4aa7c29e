#pragma once

// Experiment harness: per-trial signal generation, recovery dispatch across
// the five algorithms, quality metrics, wall-clock timing, and CSV records.
//
// Every trial is a pure function of (config, trial index): the support, the
// coefficients, the noise, and any randomized subsets are all derived from
// seeds mixed out of the config seed and the trial index, so records are
// reproducible row for row. With measure_runtime disabled, runtime_ns is
// written as 0 and the output is byte-identical across machines and runs.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sft/recover.hpp"

namespace sft {

enum class Algorithm { fast, fastr, general, single_prime, dense };

inline std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::fast: return "fast";
        case Algorithm::fastr: return "fastr";
        case Algorithm::general: return "general";
        case Algorithm::single_prime: return "single-prime";
        case Algorithm::dense: return "dense";
    }
    throw std::invalid_argument("algorithm_name: unknown algorithm");
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "fast") return Algorithm::fast;
    if (name == "fastr") return Algorithm::fastr;
    if (name == "general") return Algorithm::general;
    if (name == "single-prime") return Algorithm::single_prime;
    if (name == "dense") return Algorithm::dense;
    return std::nullopt;
}

/// Which structured support family a trial draws its signals from.
enum class SupportKind { blocks, polynomials };

struct TrialConfig {
    Algorithm algorithm = Algorithm::fast;
    i64 N = 0;
    int n = 1;
    int d = 1;
    i64 B = 0;
    std::uint64_t seed = 0;
    double snr_db = std::numeric_limits<double>::infinity();
    int k_mult = 0;               // 0: per-algorithm default (block 2, else 8)
    std::size_t subset_size = 0;  // randomized algorithms; 0: full set
    i64 hash_modulus = 0;         // single-prime; 0: smallest prime > B
    std::optional<SupportKind> support;  // default: blocks for fast/fastr/dense
    AcquisitionMode acquisition = AcquisitionMode::synth_dft;
    bool measure_runtime = true;
    std::size_t memory_budget_bytes = std::size_t{256} << 20;

    SupportKind support_kind() const {
        if (support) return *support;
        return algorithm == Algorithm::general || algorithm == Algorithm::single_prime
                   ? SupportKind::polynomials
                   : SupportKind::blocks;
    }

    int effective_k_mult() const {
        if (k_mult > 0) return k_mult;
        return algorithm == Algorithm::general || algorithm == Algorithm::single_prime ? 8 : 2;
    }
};

/// One CSV row.
struct TrialRecord {
    i64 run_id = 0;
    std::string algorithm;
    i64 N = 0;
    int n = 0;
    i64 B = 0;
    int d = 0;
    std::uint64_t seed = 0;
    double snr_db = std::numeric_limits<double>::infinity();
    i64 samples_used = 0;
    i64 runtime_ns = 0;
    bool support_exact = false;
    double avg_l1_support_error = 0.0;
    double l2_error = 0.0;
};

struct QualityMetrics {
    bool support_exact = false;
    double avg_l1_support_error = 0.0;
    double l2_error = 0.0;
};

/// Compare an estimate against the true spectrum.
///  - support_exact: the |truth| largest-magnitude entries of the estimate
///    (ties toward smaller frequency) are exactly the true support.
///  - avg_l1_support_error: sum over the true support of |c - x| divided by
///    `normalizer` (callers pass B * n, the nominal support size).
///  - l2_error: Euclidean distance between the spectra over the union of
///    their supports.
inline QualityMetrics score_estimate(const SparseSpectrum& truth, const SparseSpectrum& estimate,
                                     std::size_t normalizer) {
    if (normalizer == 0) throw std::invalid_argument("score_estimate: zero normalizer");
    QualityMetrics q;
    double l1 = 0.0;
    double l2_sq = 0.0;
    for (const auto& [w, c] : truth.entries) {
        const cplx diff = c - estimate.at(w);
        l1 += std::abs(diff);
        l2_sq += std::norm(diff);
    }
    for (const auto& [w, x] : estimate.entries)
        if (truth.entries.find(w) == truth.entries.end()) l2_sq += std::norm(x);
    q.avg_l1_support_error = l1 / static_cast<double>(normalizer);
    q.l2_error = std::sqrt(l2_sq);

    std::vector<i64> top = best_s_term_support(estimate, truth.size());
    std::vector<i64> true_support;
    true_support.reserve(truth.size());
    for (const auto& [w, c] : truth.entries) true_support.push_back(w);
    q.support_exact = top == true_support;
    return q;
}

/// Dense baseline: transform the full length-N grid and keep the `cap`
/// largest-magnitude bins (ties toward smaller frequency, exact zeros
/// dropped). Refuses beyond 2^24 to keep the full grid in memory.
inline RecoveryResult dense_recover(const SignalModel& signal, i64 N, std::size_t cap) {
    if (N < 2) throw std::invalid_argument("dense_recover: N must be >= 2");
    if (N > (i64{1} << 24)) throw std::invalid_argument("dense_recover: N beyond 2^24");
    const std::vector<cplx> full = detail::full_transform(signal, N, AcquisitionMode::synth_dft);
    std::vector<i64> bins;
    bins.reserve(full.size());
    for (i64 j = 0; j < N; ++j)
        if (full[static_cast<std::size_t>(j)] != cplx{0.0, 0.0}) bins.push_back(j);
    auto freq_of = [N](i64 j) { return j <= band_max(N) ? j : j - N; };
    const std::size_t take = std::min(cap, bins.size());
    std::partial_sort(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(take), bins.end(),
                      [&](i64 a, i64 b) {
                          const double ma = std::norm(full[static_cast<std::size_t>(a)]);
                          const double mb = std::norm(full[static_cast<std::size_t>(b)]);
                          if (ma != mb) return ma > mb;
                          return freq_of(a) < freq_of(b);
                      });
    bins.resize(take);
    RecoveryResult result;
    result.estimate.N = N;
    for (i64 j : bins) result.estimate.set(freq_of(j), full[static_cast<std::size_t>(j)]);
    result.diag.samples_used = N;
    result.diag.columns_solved = 1;
    return result;
}

/// Scheme for a config; dense has none.
inline PrimeScheme scheme_for(const TrialConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::fast:
        case Algorithm::fastr:
            return build_scheme_block(cfg.N, cfg.n, cfg.B, cfg.effective_k_mult());
        case Algorithm::general:
            return build_scheme_general(cfg.N, cfg.n, cfg.d, cfg.B, cfg.effective_k_mult());
        case Algorithm::single_prime:
            return build_scheme_single_prime(cfg.N, cfg.n, cfg.d, cfg.B,
                                             cfg.hash_modulus > 0 ? cfg.hash_modulus
                                                                  : next_prime(cfg.B),
                                             cfg.effective_k_mult());
        case Algorithm::dense:
            throw std::invalid_argument("scheme_for: dense baseline has no scheme");
    }
    throw std::invalid_argument("scheme_for: unknown algorithm");
}

/// Generate trial `index`'s signal. Separate key lanes keep the support draw,
/// the noise, and any subset draw independent of each other.
inline GeneratedSignal trial_signal(const TrialConfig& cfg, std::size_t index) {
    Rng gen(mix_key(cfg.seed, static_cast<std::uint64_t>(index), 0));
    if (cfg.support_kind() == SupportKind::blocks) {
        return generate_block_support(gen, cfg.N, cfg.n, cfg.B);
    }
    const int degree = cfg.algorithm == Algorithm::fast || cfg.algorithm == Algorithm::fastr
                           ? 1
                           : cfg.d;
    return generate_poly_support(gen, cfg.N, cfg.n, degree, cfg.B);
}

inline TrialRecord run_trial(const TrialConfig& cfg, std::size_t index, i64 run_id) {
    const GeneratedSignal sig = trial_signal(cfg, index);
    SignalModel signal;
    signal.spectrum = sig.spectrum;
    signal.snr_db = cfg.snr_db;
    signal.noise_seed = mix_key(cfg.seed, static_cast<std::uint64_t>(index), 1);

    RecoverOptions opts;
    opts.acquisition = cfg.acquisition;
    opts.memory_budget_bytes = cfg.memory_budget_bytes;
    const std::size_t cap = static_cast<std::size_t>(cfg.n) * static_cast<std::size_t>(cfg.B);

    RecoveryResult rec;
    const auto t0 = cfg.measure_runtime ? std::chrono::steady_clock::now()
                                        : std::chrono::steady_clock::time_point{};
    if (cfg.algorithm == Algorithm::dense) {
        rec = dense_recover(signal, cfg.N, cap);
    } else if (cfg.algorithm == Algorithm::fastr && cfg.subset_size > 0) {
        const PrimeScheme scheme = scheme_for(cfg);
        Rng subset_rng(mix_key(cfg.seed, static_cast<std::uint64_t>(index), 2));
        rec = recover_block_randomized(signal, scheme,
                                       std::min(cfg.subset_size, scheme.vote_primes.size()),
                                       subset_rng, opts);
    } else {
        rec = recover(signal, scheme_for(cfg), opts);
    }
    i64 elapsed = 0;
    if (cfg.measure_runtime) {
        const auto t1 = std::chrono::steady_clock::now();
        elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    }

    const QualityMetrics q = score_estimate(sig.spectrum, rec.estimate, cap);
    TrialRecord row;
    row.run_id = run_id;
    row.algorithm = std::string(algorithm_name(cfg.algorithm));
    row.N = cfg.N;
    row.n = cfg.n;
    row.B = cfg.B;
    row.d = cfg.d;
    row.seed = cfg.seed;
    row.snr_db = cfg.snr_db;
    row.samples_used = rec.diag.samples_used;
    row.runtime_ns = elapsed;
    row.support_exact = q.support_exact;
    row.avg_l1_support_error = q.avg_l1_support_error;
    row.l2_error = q.l2_error;
    return row;
}

/// Run `trials` trials of one config; run_ids count up from first_run_id.
/// Transform plans are dropped first so each config starts cold.
inline std::vector<TrialRecord> run_trials(const TrialConfig& cfg, std::size_t trials,
                                           i64 first_run_id = 0) {
    clear_dft_plans();
    std::vector<TrialRecord> out;
    out.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) out.push_back(run_trial(cfg, i, first_run_id + static_cast<i64>(i)));
    return out;
}

/// Smallest vote-prime subset size whose exact-support rate over the
/// calibration trials reaches `target_rate`. Trials are paired across subset
/// sizes (same signals and noise), so the search is a clean binary search on
/// an empirically monotone curve. Returns the full count when even it misses
/// the target.
inline std::size_t tune_subset_size(TrialConfig cfg, std::size_t trials, double target_rate) {
    if (cfg.algorithm != Algorithm::fastr)
        throw std::invalid_argument("tune_subset_size: config must use the randomized algorithm");
    if (trials == 0 || target_rate <= 0.0 || target_rate > 1.0)
        throw std::invalid_argument("tune_subset_size: bad trials/target");
    cfg.measure_runtime = false;
    const std::size_t full = scheme_for(cfg).vote_primes.size();
    auto rate = [&](std::size_t size) {
        cfg.subset_size = size;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < trials; ++i)
            if (run_trial(cfg, i, 0).support_exact) ++hits;
        return static_cast<double>(hits) / static_cast<double>(trials);
    };
    std::size_t lo = 1, hi = full;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (rate(mid) >= target_rate) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

inline constexpr std::string_view csv_header =
    "run_id,algorithm,N,n,B,d,seed,snr_db,samples_used,runtime_ns,"
    "support_exact,avg_l1_support_error,l2_error";

inline void write_csv(std::ostream& os, std::span<const TrialRecord> records) {
    os << csv_header << "\n";
    for (const TrialRecord& r : records) {
        os << r.run_id << ',' << r.algorithm << ',' << r.N << ',' << r.n << ',' << r.B << ','
           << r.d << ',' << r.seed << ',';
        if (std::isinf(r.snr_db) && r.snr_db > 0) os << "inf";
        else os << detail::double_text(r.snr_db);
        os << ',' << r.samples_used << ',' << r.runtime_ns << ',' << (r.support_exact ? '1' : '0')
           << ',' << detail::double_text(r.avg_l1_support_error) << ','
           << detail::double_text(r.l2_error) << "\n";
    }
}

}  // namespace sft
