// Command-line front end: signal generation, single-shot recovery, benchmark
// sweeps, noise sweeps, estimate verification, and subset-size tuning.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sft/sft.hpp"

using namespace sft;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_snr(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    return std::stod(text);
}

AcquisitionMode parse_pipeline(const std::string& name) {
    if (name == "sample") return AcquisitionMode::sample_dft;
    if (name == "synth") return AcquisitionMode::synth_dft;
    if (name == "alias") return AcquisitionMode::alias_direct;
    throw CLI::ValidationError("--pipeline", "expected sample, synth, or alias");
}

Algorithm parse_alg_or_throw(const std::string& name) {
    const auto alg = parse_algorithm(name);
    if (!alg) throw CLI::ValidationError("--alg", "unknown algorithm '" + name + "'");
    return *alg;
}

SparseSpectrum load_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_spectrum(in);
}

void save_spectrum_file(const SparseSpectrum& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    save_spectrum(out, spec);
}

void print_metrics(const QualityMetrics& q, const RecoveryDiagnostics& diag, i64 runtime_ns) {
    std::cout << "support_exact " << (q.support_exact ? 1 : 0) << "\n"
              << "avg_l1_support_error " << q.avg_l1_support_error << "\n"
              << "l2_error " << q.l2_error << "\n"
              << "samples_used " << diag.samples_used << "\n"
              << "columns_solved " << diag.columns_solved << "\n"
              << "runtime_ms " << static_cast<double>(runtime_ns) / 1e6 << "\n";
}

int run_gen(i64 N, int n, i64 B, int d, std::uint64_t seed, const std::string& structure,
            const std::string& out) {
    Rng rng(seed);
    GeneratedSignal sig;
    if (structure == "block") sig = generate_block_support(rng, N, n, B);
    else if (structure == "poly") sig = generate_poly_support(rng, N, n, d, B);
    else throw CLI::ValidationError("--structure", "expected block or poly");
    save_spectrum_file(sig.spectrum, out);
    std::cout << "wrote " << sig.spectrum.size() << " tones (bandwidth " << N << ") to " << out
              << "\n";
    return 0;
}

struct RecoverFlags {
    std::string in;
    std::string alg = "fast";
    int n = 1;
    int d = 1;
    i64 B = 16;
    int k_mult = 0;
    std::size_t subset_size = 0;
    i64 u = 0;
    std::string snr = "inf";
    std::uint64_t seed = 0;
    std::string pipeline = "synth";
    std::string out;
};

int run_recover(const RecoverFlags& f) {
    const SparseSpectrum truth = load_spectrum_file(f.in);
    const Algorithm alg = parse_alg_or_throw(f.alg);

    TrialConfig cfg;
    cfg.algorithm = alg;
    cfg.N = truth.N;
    cfg.n = f.n;
    cfg.d = f.d;
    cfg.B = f.B;
    cfg.k_mult = f.k_mult;
    cfg.hash_modulus = f.u;

    SignalModel signal;
    signal.spectrum = truth;
    signal.snr_db = parse_snr(f.snr);
    signal.noise_seed = mix_key(f.seed, 1);

    RecoverOptions opts;
    opts.acquisition = parse_pipeline(f.pipeline);

    const std::size_t cap = static_cast<std::size_t>(f.n) * static_cast<std::size_t>(f.B);
    const auto t0 = std::chrono::steady_clock::now();
    RecoveryResult res;
    if (alg == Algorithm::dense) {
        res = dense_recover(signal, truth.N, cap);
    } else if (alg == Algorithm::fastr && f.subset_size > 0) {
        const auto scheme = scheme_for(cfg);
        Rng subset_rng(mix_key(f.seed, 2));
        res = recover_block_randomized(signal, scheme,
                                       std::min(f.subset_size, scheme.vote_primes.size()),
                                       subset_rng, opts);
    } else {
        res = recover(signal, scheme_for(cfg), opts);
    }
    const auto t1 = std::chrono::steady_clock::now();

    const auto q = score_estimate(truth, res.estimate, cap);
    print_metrics(q, res.diag,
                  std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    std::cout << "recovered " << res.estimate.size() << " tones\n";
    save_spectrum(std::cout, res.estimate);
    if (!f.out.empty()) {
        save_spectrum_file(res.estimate, f.out);
        std::cout << "estimate written to " << f.out << "\n";
    }
    return 0;
}

struct BenchFlags {
    std::string alg = "fast";
    std::string N = "1048576";
    std::string n = "1";
    std::string B = "16";
    std::string snr = "inf";
    int d = 1;
    int k_mult = 0;
    std::size_t subset_size = 0;
    std::size_t trials = 5;
    std::uint64_t seed = 0;
    std::string pipeline = "synth";
    std::string structure;
    bool no_timing = false;
    std::string out;
};

int run_bench(const BenchFlags& f) {
    std::vector<TrialRecord> rows;
    i64 run_id = 0;
    for (const std::string& alg : split_list(f.alg))
        for (const std::string& N : split_list(f.N))
            for (const std::string& n : split_list(f.n))
                for (const std::string& B : split_list(f.B))
                    for (const std::string& snr : split_list(f.snr)) {
                        TrialConfig cfg;
                        cfg.algorithm = parse_alg_or_throw(alg);
                        cfg.N = std::stoll(N);
                        cfg.n = std::stoi(n);
                        cfg.B = std::stoll(B);
                        cfg.d = f.d;
                        cfg.seed = f.seed;
                        cfg.snr_db = parse_snr(snr);
                        cfg.k_mult = f.k_mult;
                        cfg.subset_size = f.subset_size;
                        cfg.acquisition = parse_pipeline(f.pipeline);
                        cfg.measure_runtime = !f.no_timing;
                        if (f.structure == "block") cfg.support = SupportKind::blocks;
                        else if (f.structure == "poly") cfg.support = SupportKind::polynomials;
                        else if (!f.structure.empty())
                            throw CLI::ValidationError("--structure", "expected block or poly");
                        const auto batch = run_trials(cfg, f.trials, run_id);
                        run_id += static_cast<i64>(batch.size());
                        rows.insert(rows.end(), batch.begin(), batch.end());
                    }
    if (f.out.empty()) {
        write_csv(std::cout, rows);
    } else {
        std::ofstream os(f.out);
        if (!os) throw std::runtime_error("cannot write " + f.out);
        write_csv(os, rows);
        std::cout << rows.size() << " rows written to " << f.out << "\n";
    }
    return 0;
}

struct SweepFlags {
    std::string alg = "fast";
    i64 N = 1 << 20;
    int n = 1;
    i64 B = 16;
    int d = 1;
    int k_mult = 0;
    std::size_t subset_size = 0;
    std::string snr = "0,10,20,30,40,50,60";
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    std::string out;
};

int run_noise_sweep(const SweepFlags& f) {
    std::vector<TrialRecord> all_rows;
    i64 run_id = 0;
    std::cout << "snr_db\texact_rate\tavg_l1\n";
    for (const std::string& snr_text : split_list(f.snr)) {
        TrialConfig cfg;
        cfg.algorithm = parse_alg_or_throw(f.alg);
        cfg.N = f.N;
        cfg.n = f.n;
        cfg.B = f.B;
        cfg.d = f.d;
        cfg.seed = f.seed;
        cfg.snr_db = parse_snr(snr_text);
        cfg.k_mult = f.k_mult;
        cfg.subset_size = f.subset_size;
        cfg.acquisition = AcquisitionMode::alias_direct;
        cfg.measure_runtime = false;
        const auto rows = run_trials(cfg, f.trials, run_id);
        run_id += static_cast<i64>(rows.size());
        // The error average only counts trials that identified the support;
        // the rate column carries the misses.
        int exact = 0;
        double l1 = 0.0;
        for (const auto& r : rows) {
            if (!r.support_exact) continue;
            ++exact;
            l1 += r.avg_l1_support_error;
        }
        std::cout << snr_text << "\t" << static_cast<double>(exact) / static_cast<double>(rows.size())
                  << "\t";
        if (exact > 0) std::cout << l1 / static_cast<double>(exact) << "\n";
        else std::cout << "nan\n";
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }
    if (!f.out.empty()) {
        std::ofstream os(f.out);
        if (!os) throw std::runtime_error("cannot write " + f.out);
        write_csv(os, all_rows);
    }
    return 0;
}

int run_verify_compare(const std::string& truth_path, const std::string& est_path, int n, i64 B) {
    const SparseSpectrum truth = load_spectrum_file(truth_path);
    const SparseSpectrum est = load_spectrum_file(est_path);
    if (truth.N != est.N)
        std::cout << "note: bandwidths differ (" << truth.N << " vs " << est.N << ")\n";
    const std::size_t cap = static_cast<std::size_t>(n) * static_cast<std::size_t>(B);
    const auto q = score_estimate(truth, est, cap > 0 ? cap : truth.size());
    RecoveryDiagnostics none;
    print_metrics(q, none, 0);
    return q.support_exact ? 0 : 2;
}

/// Invariant suites: fast self-checks of the identities the recovery pipeline
/// is built on. Exit 0 only if every suite holds.
int run_verify_suites(std::uint64_t seed) {
    Rng rng(mix_key(seed, 0xa11a5));
    bool all_ok = true;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[ok]   " : "[fail] ") << name << ": " << detail << "\n";
        all_ok = all_ok && ok;
    };

    auto random_spectrum = [&](i64 N, i64 tones) {
        SparseSpectrum out(N);
        for (i64 i = 0; i < tones; ++i)
            out.set(rng.uniform_int(band_min(N), band_max(N)), rng.complex_gaussian());
        return out;
    };

    {  // Subsampling in time folds the spectrum by aliasing.
        double worst = 0.0;
        for (int rep = 0; rep < 300; ++rep) {
            const i64 N = i64{1} << rng.uniform_int(8, 18);
            const auto spec = random_spectrum(N, rng.uniform_int(1, 20));
            const i64 m = rng.uniform_int(1, 2048);
            const auto via_dft = dft(sample_vector(spec, m));
            const auto direct = alias_project(spec, m);
            for (i64 j = 0; j < m; ++j)
                worst = std::max(worst, std::abs(via_dft[static_cast<std::size_t>(j)] -
                                                 direct[static_cast<std::size_t>(j)]));
        }
        std::ostringstream os;
        os << "worst error " << worst << " over 300 cases";
        report("aliasing identity", worst <= 1e-10, os.str());
    }

    {  // Residue-class extraction picks out exactly the class sums.
        double worst = 0.0;
        for (int rep = 0; rep < 300; ++rep) {
            const i64 N = i64{1} << rng.uniform_int(8, 18);
            const auto spec = random_spectrum(N, rng.uniform_int(1, 16));
            const i64 u = i64{1} << rng.uniform_int(1, 5);
            i64 r = 2 * rng.uniform_int(1, 99) + 1;  // odd, so coprime with u
            const i64 nu = rng.uniform_int(0, u - 1);
            const auto got = extract_residue_dft(dft(sample_vector(spec, r * u)), nu, r, u);
            for (i64 j = 0; j < r; ++j) {
                cplx want{0.0, 0.0};
                for (const auto& [w, c] : spec.entries)
                    if (mod_floor(w, u) == nu && mod_floor(w, r) == j) want += c;
                worst = std::max(worst, std::abs(got[static_cast<std::size_t>(j)] - want));
            }
        }
        std::ostringstream os;
        os << "worst error " << worst << " over 300 cases";
        report("residue-class extraction", worst <= 1e-10, os.str());
    }

    {  // Modular reconstruction round-trips the whole signed band.
        const std::vector<i64> moduli{16, 9, 5, 7};
        i64 P = 1;
        for (i64 m : moduli) P *= m;
        const i64 N = i64{1} << 12;
        i64 failures = 0;
        std::vector<std::pair<i64, i64>> residues(moduli.size());
        for (i64 w = band_min(N); w <= band_max(N); ++w) {
            for (std::size_t i = 0; i < moduli.size(); ++i)
                residues[i] = {mod_floor(w, moduli[i]), moduli[i]};
            const auto back = to_signed_band(crt_reconstruct(residues), P, N);
            if (!back || *back != w) ++failures;
        }
        std::ostringstream os;
        os << failures << " failures over " << N << " frequencies";
        report("modular reconstruction", failures == 0, os.str());
    }

    {  // The value-based and coefficient-based hashing predicates agree.
        const auto primes = primes_up_to(211);
        i64 mismatches = 0;
        for (int rep = 0; rep < 3000; ++rep) {
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
            if (hashes_well(g, p) != hashes_well_by_coeffs(g, p)) ++mismatches;
        }
        std::ostringstream os;
        os << mismatches << " mismatches over 3000 cases";
        report("hashing predicates", mismatches == 0, os.str());
    }

    return all_ok ? 0 : 1;
}

struct TuneFlags {
    i64 N = 1 << 20;
    int n = 1;
    i64 B = 16;
    int k_mult = 0;
    std::string snr = "inf";
    std::size_t trials = 25;
    std::uint64_t seed = 0;
    double target = 0.9;
};

int run_tune(const TuneFlags& f) {
    TrialConfig cfg;
    cfg.algorithm = Algorithm::fastr;
    cfg.N = f.N;
    cfg.n = f.n;
    cfg.B = f.B;
    cfg.seed = f.seed;
    cfg.snr_db = parse_snr(f.snr);
    cfg.k_mult = f.k_mult;
    cfg.acquisition = AcquisitionMode::alias_direct;
    const std::size_t full = scheme_for(cfg).vote_primes.size();
    const std::size_t tuned = tune_subset_size(cfg, f.trials, f.target);
    std::cout << "subset_size " << tuned << " of " << full << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse Fourier recovery toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a structured sparse spectrum file");
    i64 gen_N = 1 << 20, gen_B = 16;
    int gen_n = 1, gen_d = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_structure = "block", gen_out = "signal.spec";
    gen->add_option("--N", gen_N, "bandwidth");
    gen->add_option("--n", gen_n, "number of generators");
    gen->add_option("--B", gen_B, "tones per generator");
    gen->add_option("--d", gen_d, "generator degree (poly structure)");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--structure", gen_structure, "block or poly");
    gen->add_option("--out", gen_out, "output spectrum file");

    // recover
    auto* rec = app.add_subcommand("recover", "recover a spectrum from one signal file");
    RecoverFlags rf;
    rec->add_option("--in", rf.in, "truth spectrum file")->required();
    rec->add_option("--alg", rf.alg, "fast, fastr, general, single-prime, dense");
    rec->add_option("--n", rf.n, "number of generators");
    rec->add_option("--d", rf.d, "generator degree");
    rec->add_option("--B", rf.B, "tones per generator");
    rec->add_option("--k-mult", rf.k_mult, "vote-prime count multiplier (0 = default)");
    rec->add_option("--subset-size", rf.subset_size, "randomized vote-prime subset size");
    rec->add_option("--u", rf.u, "hash modulus for single-prime (0 = smallest prime > B)");
    rec->add_option("--snr", rf.snr, "signal-to-noise ratio in dB, or inf");
    rec->add_option("--seed", rf.seed, "noise/subset seed");
    rec->add_option("--pipeline", rf.pipeline, "sample, synth, or alias");
    rec->add_option("--out", rf.out, "write the estimate to this file");

    // bench
    auto* bench = app.add_subcommand("bench", "run benchmark trials over a parameter grid");
    BenchFlags bf;
    bench->add_option("--alg", bf.alg, "comma list of algorithms");
    bench->add_option("--N", bf.N, "comma list of bandwidths");
    bench->add_option("--n", bf.n, "comma list of generator counts");
    bench->add_option("--B", bf.B, "comma list of tones per generator");
    bench->add_option("--snr", bf.snr, "comma list of SNRs in dB (inf for noiseless)");
    bench->add_option("--d", bf.d, "generator degree");
    bench->add_option("--k-mult", bf.k_mult, "vote-prime count multiplier (0 = default)");
    bench->add_option("--subset-size", bf.subset_size, "randomized subset size (fastr)");
    bench->add_option("--trials", bf.trials, "trials per configuration");
    bench->add_option("--seed", bf.seed, "base seed");
    bench->add_option("--pipeline", bf.pipeline, "sample, synth, or alias");
    bench->add_option("--structure", bf.structure, "force block or poly supports");
    bench->add_flag("--no-timing", bf.no_timing, "write runtime_ns as 0 for stable output");
    bench->add_option("--out", bf.out, "CSV output file (default: stdout)");

    // noise-sweep
    auto* sweep = app.add_subcommand("noise-sweep", "exact-rate and error trend across SNRs");
    SweepFlags sf;
    sweep->add_option("--alg", sf.alg, "algorithm");
    sweep->add_option("--N", sf.N, "bandwidth");
    sweep->add_option("--n", sf.n, "number of generators");
    sweep->add_option("--B", sf.B, "tones per generator");
    sweep->add_option("--d", sf.d, "generator degree");
    sweep->add_option("--k-mult", sf.k_mult, "vote-prime count multiplier (0 = default)");
    sweep->add_option("--subset-size", sf.subset_size, "randomized subset size (fastr)");
    sweep->add_option("--snr", sf.snr, "comma list of SNRs in dB");
    sweep->add_option("--trials", sf.trials, "trials per SNR");
    sweep->add_option("--seed", sf.seed, "base seed");
    sweep->add_option("--out", sf.out, "also write every trial row to this CSV");

    // verify
    auto* verify = app.add_subcommand(
        "verify", "run the invariant suites, or score an estimate against a truth file");
    std::string v_truth, v_est;
    int v_n = 0;
    i64 v_B = 0;
    std::uint64_t v_seed = 0;
    verify->add_option("--truth", v_truth, "truth spectrum file (enables comparison mode)");
    verify->add_option("--est", v_est, "estimate spectrum file (enables comparison mode)");
    verify->add_option("--n", v_n, "number of generators (for the error normalizer)");
    verify->add_option("--B", v_B, "tones per generator (for the error normalizer)");
    verify->add_option("--seed", v_seed, "seed for the invariant suites");

    // tune
    auto* tune = app.add_subcommand("tune", "find the smallest reliable vote-prime subset");
    TuneFlags tf;
    tune->add_option("--N", tf.N, "bandwidth");
    tune->add_option("--n", tf.n, "number of generators");
    tune->add_option("--B", tf.B, "tones per generator");
    tune->add_option("--k-mult", tf.k_mult, "vote-prime count multiplier (0 = default)");
    tune->add_option("--snr", tf.snr, "SNR in dB, or inf");
    tune->add_option("--trials", tf.trials, "calibration trials per size");
    tune->add_option("--seed", tf.seed, "base seed");
    tune->add_option("--target", tf.target, "exact-support rate to reach");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(gen_N, gen_n, gen_B, gen_d, gen_seed, gen_structure, gen_out);
        if (rec->parsed()) return run_recover(rf);
        if (bench->parsed()) return run_bench(bf);
        if (sweep->parsed()) return run_noise_sweep(sf);
        if (verify->parsed()) {
            if (v_truth.empty() != v_est.empty())
                throw CLI::ValidationError("--truth/--est", "comparison mode needs both files");
            if (!v_truth.empty()) return run_verify_compare(v_truth, v_est, v_n, v_B);
            return run_verify_suites(v_seed);
        }
        if (tune->parsed()) return run_tune(tf);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
