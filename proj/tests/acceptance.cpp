// Acceptance gate: one check per release criterion, each printing a single
// [PASS]/[FAIL] line. Run with no arguments for the full gate, or pass any of
// 1 2 3 4 5 6 7 8a 8b 8c (8 expands to all three scaling checks) to run a
// subset. Exit status is 0 only if every selected check passes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sft/sft.hpp"
#include "support/oracles.hpp"

using namespace sft;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double median_ns(std::vector<TrialRecord> rows) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(static_cast<double>(r.runtime_ns));
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

double max_union_error(const SparseSpectrum& truth, const SparseSpectrum& est) {
    double err = 0.0;
    for (const auto& [w, c] : truth.entries) err = std::max(err, std::abs(c - est.at(w)));
    for (const auto& [w, x] : est.entries)
        if (truth.entries.find(w) == truth.entries.end()) err = std::max(err, std::abs(x));
    return err;
}

bool same_support(const SparseSpectrum& truth, const SparseSpectrum& est) {
    if (truth.size() != est.size()) return false;
    auto a = truth.entries.begin();
    auto b = est.entries.begin();
    for (; a != truth.entries.end(); ++a, ++b)
        if (a->first != b->first) return false;
    return true;
}

// Exact recovery of block-structured spectra from synthesized measurements.
Outcome criterion_1() {
    const i64 N = i64{1} << 22;
    const auto scheme = build_scheme_block(N, 3, 16, 2);
    RecoverOptions opts;
    opts.acquisition = AcquisitionMode::alias_direct;
    int exact = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng gen(mix_key(101, i, 0));
        const auto sig = generate_block_support(gen, N, 3, 16);
        const auto res = recover({sig.spectrum}, scheme, opts);
        const double err = max_union_error(sig.spectrum, res.estimate);
        worst = std::max(worst, err);
        if (same_support(sig.spectrum, res.estimate) && err < 1e-8) ++exact;
    }
    std::ostringstream os;
    os << "noiseless block recovery " << exact << "/100 exact, worst coefficient error "
       << worst;
    return {exact == 100, os.str()};
}

// Exact recovery of polynomially structured spectra.
Outcome criterion_2() {
    const i64 N = i64{1} << 20;
    const auto scheme = build_scheme_general(N, 2, 2, 8, 2);
    RecoverOptions opts;
    opts.acquisition = AcquisitionMode::alias_direct;
    int exact = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        Rng gen(mix_key(202, i, 0));
        const auto sig = generate_poly_support(gen, N, 2, 2, 8);
        const auto res = recover({sig.spectrum}, scheme, opts);
        const double err = max_union_error(sig.spectrum, res.estimate);
        worst = std::max(worst, err);
        if (same_support(sig.spectrum, res.estimate) && err < 1e-8) ++exact;
    }
    std::ostringstream os;
    os << "noiseless polynomial-support recovery " << exact << "/50 exact, worst coefficient error "
       << worst;
    return {exact == 50, os.str()};
}

// Subsampled transforms match the aliasing projection, and residue-class
// extraction matches the brute-force class sums.
Outcome criterion_3() {
    Rng rng(303);
    double worst_alias = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const i64 N = i64{1} << rng.uniform_int(8, 20);
        const auto spec = testsupport::random_spectrum(rng, N, static_cast<std::size_t>(rng.uniform_int(1, 24)));
        const i64 m = rng.uniform_int(1, 4096);
        const auto via_dft = dft(sample_vector(spec, m));
        const auto direct = alias_project(spec, m);
        for (i64 j = 0; j < m; ++j)
            worst_alias = std::max(worst_alias,
                                   std::abs(via_dft[static_cast<std::size_t>(j)] -
                                            direct[static_cast<std::size_t>(j)]));
    }

    double worst_class = 0.0;
    const i64 u_choices[] = {2, 4, 8, 16, 32, 5, 13};
    for (int rep = 0; rep < 1000; ++rep) {
        const i64 N = i64{1} << rng.uniform_int(8, 20);
        const auto spec = testsupport::random_spectrum(rng, N, static_cast<std::size_t>(rng.uniform_int(1, 16)));
        const i64 u = u_choices[rng.uniform_int(0, 6)];
        i64 r = rng.uniform_int(3, 199);
        while (gcd_i64(r, u) != 1) ++r;
        const i64 nu = rng.uniform_int(0, u - 1);
        const auto full = dft(sample_vector(spec, r * u));
        const auto got = extract_residue_dft(full, nu, r, u);
        for (i64 j = 0; j < r; ++j)
            worst_class = std::max(
                worst_class, std::abs(got[static_cast<std::size_t>(j)] -
                                      testsupport::restricted_class_sum(spec, u, nu, r, j)));
    }
    std::ostringstream os;
    os << "aliasing identity worst error " << worst_alias << ", class extraction worst error "
       << worst_class << " over 1000+1000 cases";
    return {worst_alias <= 1e-10 && worst_class <= 1e-10, os.str()};
}

// Modular reconstruction round-trips, the two hashing predicates agree, and
// most hash moduli separate random generator sets.
Outcome criterion_4() {
    const std::vector<i64> moduli{16, 9, 5, 7};
    i64 P = 1;
    for (i64 m : moduli) P *= m;  // 5040 covers a bandwidth of 2^12
    const i64 N = i64{1} << 12;
    i64 crt_failures = 0;
    std::vector<std::pair<i64, i64>> residues(moduli.size());
    for (i64 x = 0; x < P; ++x) {
        for (std::size_t i = 0; i < moduli.size(); ++i)
            residues[i] = {mod_floor(x, moduli[i]), moduli[i]};
        if (crt_reconstruct(residues) != x) ++crt_failures;
    }
    for (i64 w = band_min(N); w <= band_max(N); ++w) {
        for (std::size_t i = 0; i < moduli.size(); ++i)
            residues[i] = {mod_floor(w, moduli[i]), moduli[i]};
        const auto back = to_signed_band(crt_reconstruct(residues), P, N);
        if (!back || *back != w) ++crt_failures;
    }

    Rng rng(404);
    const auto primes = primes_up_to(211);
    i64 predicate_mismatches = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const int d = static_cast<int>(rng.uniform_int(1, 4));
        const i64 B = rng.uniform_int(d + 1, 40);
        std::vector<i64> over_b;
        for (i64 p : primes)
            if (p > B) over_b.push_back(p);
        const i64 p = over_b[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<i64>(over_b.size()) - 1))];
        GeneratorPolynomial g;
        g.eval_count = B;
        g.coeffs.resize(static_cast<std::size_t>(d) + 1);
        for (auto& c : g.coeffs) c = rng.uniform_int(-100, 100);
        if (hashes_well(g, p) != hashes_well_by_coeffs(g, p)) ++predicate_mismatches;
    }

    const auto scheme = build_scheme_general(i64{1} << 20, 2, 2, 8, 2);
    const i64 M = static_cast<i64>(scheme.hash_moduli.size());
    int separation_failures = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng gen(mix_key(405, i, 0));
        const auto sig = generate_poly_support(gen, i64{1} << 20, 2, 2, 8);
        if (2 * count_well_hashing(sig.support.generators, scheme) <= M) ++separation_failures;
    }

    std::ostringstream os;
    os << "reconstruction failures " << crt_failures << ", predicate mismatches "
       << predicate_mismatches << "/10000, separation failures " << separation_failures
       << "/200 (M=" << M << ")";
    return {crt_failures == 0 && predicate_mismatches == 0 && separation_failures == 0, os.str()};
}

// Approximation bounds under bandlimited contamination.
Outcome criterion_5() {
    RecoverOptions opts;
    opts.acquisition = AcquisitionMode::alias_direct;
    std::ostringstream os;
    bool ok = true;

    // Euclidean bound on polynomially structured signals.
    {
        const i64 N = i64{1} << 16;
        const auto scheme = build_scheme_general(N, 2, 2, 8, 2);
        const std::size_t Bn = 16;
        int violations = 0;
        double worst_margin = 1e300;
        for (double eps : {1e-3, 1e-2}) {
            for (std::uint64_t i = 0; i < 100; ++i) {
                Rng gen(mix_key(505, i, 0));
                const auto sig = generate_poly_support(gen, N, 2, 2, 8);
                Rng noise_rng(mix_key(505, i, 1));
                const auto eta =
                    testsupport::make_bandlimited_noise(noise_rng, N, 32, eps, sig.spectrum);
                SparseSpectrum combined = sig.spectrum;
                for (const auto& [w, c] : eta.entries) combined.add(w, c);

                const auto res = recover({combined}, scheme, opts);
                const double lhs = testsupport::sparse_l2_distance(combined, res.estimate);
                const double opt_tail = best_s_term_residual(combined, Bn).l2_norm();
                const double delta =
                    testsupport::column_tail_delta(combined, scheme, sig.support.generators);
                const double rhs =
                    opt_tail + std::sqrt(static_cast<double>(Bn)) * (eps + 6.0 * delta);
                worst_margin = std::min(worst_margin, rhs - lhs);
                if (lhs > rhs) ++violations;
            }
        }
        os << "euclidean bound violations " << violations << "/200 (slack >= " << worst_margin
           << ")";
        ok = ok && violations == 0;
    }

    // l1 bound on block-structured signals.
    {
        const i64 N = i64{1} << 22;
        const auto scheme = build_scheme_block(N, 3, 16, 2);
        const std::size_t Bn = 48;
        int violations = 0;
        double worst_margin = 1e300;
        for (double eps : {1e-3, 1e-2}) {
            for (std::uint64_t i = 0; i < 100; ++i) {
                Rng gen(mix_key(506, i, 0));
                const auto sig = generate_block_support(gen, N, 3, 16);
                Rng noise_rng(mix_key(506, i, 1));
                const auto eta =
                    testsupport::make_bandlimited_noise(noise_rng, N, 32, eps, sig.spectrum);
                SparseSpectrum combined = sig.spectrum;
                for (const auto& [w, c] : eta.entries) combined.add(w, c);

                const auto res = recover({combined}, scheme, opts);
                const double lhs = testsupport::sparse_l1_distance(combined, res.estimate);
                double opt_tail = 0.0;
                for (const auto& [w, c] : best_s_term_residual(combined, Bn).entries)
                    opt_tail += std::abs(c);
                const double rhs = 4.0 * opt_tail + 2.0 * static_cast<double>(Bn) * eps;
                worst_margin = std::min(worst_margin, rhs - lhs);
                if (lhs > rhs) ++violations;
            }
        }
        os << "; l1 bound violations " << violations << "/200 (slack >= " << worst_margin << ")";
        ok = ok && violations == 0;
    }
    return {ok, os.str()};
}

// Noise robustness: high exact-support rates from 20 dB up, and the average
// support error decaying by about one decade per 20 dB.
Outcome criterion_6() {
    TrialConfig cfg;
    cfg.algorithm = Algorithm::fast;
    cfg.N = i64{1} << 22;
    cfg.n = 3;
    cfg.B = 16;
    cfg.seed = 606;
    cfg.acquisition = AcquisitionMode::alias_direct;
    cfg.measure_runtime = false;

    std::vector<double> snrs{0, 10, 20, 30, 40, 50, 60};
    std::vector<double> xs, ys;
    bool rates_ok = true;
    std::ostringstream rates;
    for (double snr : snrs) {
        cfg.snr_db = snr;
        const auto rows = run_trials(cfg, 100);
        // Error averages only count trials that identified the support.
        int exact = 0;
        double l1_sum = 0.0;
        for (const auto& r : rows) {
            if (!r.support_exact) continue;
            ++exact;
            l1_sum += r.avg_l1_support_error;
        }
        const double rate = exact / 100.0;
        if (snr >= 20.0) {
            if (rate < 0.90) rates_ok = false;
            if (exact > 0) {
                xs.push_back(snr);
                ys.push_back(std::log10(l1_sum / exact));
            }
        }
        rates << (snr == 0 ? "" : " ") << snr << "dB:" << exact << "%";
    }
    const double slope = ls_slope(xs, ys);
    const bool slope_ok = slope >= -0.065 && slope <= -0.035;
    std::ostringstream os;
    os << "exact rates [" << rates.str() << "], error slope " << slope
       << " per dB (want [-0.065, -0.035])";
    return {rates_ok && slope_ok, os.str()};
}

// Randomized recovery with a tuned vote-prime subset keeps a high success
// rate on fresh trials.
Outcome criterion_7() {
    TrialConfig calib;
    calib.algorithm = Algorithm::fastr;
    calib.N = i64{1} << 22;
    calib.n = 3;
    calib.B = 16;
    calib.seed = 707;
    calib.acquisition = AcquisitionMode::alias_direct;
    const std::size_t full = scheme_for(calib).vote_primes.size();
    const std::size_t tuned = tune_subset_size(calib, 50, 0.9);

    TrialConfig eval = calib;
    eval.seed = 708;
    eval.subset_size = tuned;
    eval.measure_runtime = false;
    int exact = 0;
    for (std::size_t i = 0; i < 100; ++i)
        if (run_trial(eval, i, 0).support_exact) ++exact;

    std::ostringstream os;
    os << "tuned subset " << tuned << "/" << full << " primes, " << exact
       << "/100 fresh trials exact";
    return {exact >= 90, os.str()};
}

// Sample counts versus a quarter of the bandwidth across block sizes.
Outcome criterion_8a() {
    const i64 N = i64{1} << 22;
    const i64 quarter = N / 4;
    std::ostringstream os;
    bool ok = true;
    for (i64 B : {16, 32, 64, 128, 256}) {
        const i64 total = build_scheme_block(N, 2, B, 2).total_samples();
        os << "B=" << B << ":" << total << (total < quarter ? "<" : ">=") << quarter << " ";
        if (total >= quarter) ok = false;
    }
    return {ok, os.str() + (ok ? "" : "(sample counts exceed N/4)")};
}

// Runtime grows polynomially in the block size with a modest exponent.
Outcome criterion_8b() {
    TrialConfig cfg;
    cfg.algorithm = Algorithm::fast;
    cfg.N = i64{1} << 22;
    cfg.n = 2;
    cfg.seed = 808;
    std::vector<double> xs, ys;
    std::ostringstream os;
    for (i64 B : {16, 32, 64, 128, 256, 512}) {
        cfg.B = B;
        const double ns = median_ns(run_trials(cfg, 3));
        xs.push_back(std::log(static_cast<double>(B)));
        ys.push_back(std::log(ns));
        os << "B=" << B << ":" << ns / 1e6 << "ms ";
    }
    const double slope = ls_slope(xs, ys);
    os << "log-log slope " << slope << " (want [0.5, 1.5])";
    return {slope >= 0.5 && slope <= 1.5, os.str()};
}

// Sparse recovery beats the dense full-bandwidth baseline.
Outcome criterion_8c() {
    TrialConfig cfg;
    cfg.N = i64{1} << 22;
    cfg.B = 16;
    cfg.seed = 809;
    std::ostringstream os;
    bool ok = true;
    for (int n : {1, 2, 3}) {
        cfg.n = n;
        cfg.algorithm = Algorithm::fast;
        const double fast_ns = median_ns(run_trials(cfg, 5));
        cfg.algorithm = Algorithm::dense;
        const double dense_ns = median_ns(run_trials(cfg, 5));
        os << "n=" << n << ":" << fast_ns / 1e6 << "ms vs dense " << dense_ns / 1e6 << "ms ";
        if (fast_ns >= dense_ns) ok = false;
    }
    return {ok, os.str() + (ok ? "" : "(dense baseline wins at the largest n)")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, Outcome (*)()>> all{
        {"1", criterion_1},   {"2", criterion_2},   {"3", criterion_3},
        {"4", criterion_4},   {"5", criterion_5},   {"6", criterion_6},
        {"7", criterion_7},   {"8a", criterion_8a}, {"8b", criterion_8b},
        {"8c", criterion_8c},
    };
    std::vector<std::string> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "8") {
            wanted.insert(wanted.end(), {"8a", "8b", "8c"});
            continue;
        }
        bool known = false;
        for (const auto& [name, fn] : all) known = known || name == arg;
        if (!known) {
            std::cerr << "unknown criterion '" << arg << "' (use 1-7, 8, 8a, 8b, 8c)\n";
            return 2;
        }
        wanted.push_back(arg);
    }

    bool all_pass = true;
    for (const auto& [name, fn] : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end())
            continue;
        const Outcome out = fn();
        std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << name << ": "
                  << out.detail << std::endl;
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
