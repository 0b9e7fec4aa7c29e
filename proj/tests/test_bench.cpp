#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "sft/bench.hpp"

using namespace sft;

TEST_CASE("algorithm names round-trip", "[bench]") {
    for (Algorithm a : {Algorithm::fast, Algorithm::fastr, Algorithm::general,
                        Algorithm::single_prime, Algorithm::dense}) {
        const auto parsed = parse_algorithm(algorithm_name(a));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == a);
    }
    CHECK(algorithm_name(Algorithm::single_prime) == "single-prime");
    CHECK_FALSE(parse_algorithm("fastest").has_value());
    CHECK_FALSE(parse_algorithm("").has_value());
}

TEST_CASE("config defaults", "[bench]") {
    TrialConfig cfg;
    cfg.algorithm = Algorithm::fast;
    CHECK(cfg.support_kind() == SupportKind::blocks);
    CHECK(cfg.effective_k_mult() == 2);
    cfg.algorithm = Algorithm::general;
    CHECK(cfg.support_kind() == SupportKind::polynomials);
    CHECK(cfg.effective_k_mult() == 8);
    cfg.k_mult = 3;
    CHECK(cfg.effective_k_mult() == 3);
    cfg.support = SupportKind::blocks;
    CHECK(cfg.support_kind() == SupportKind::blocks);
    cfg.algorithm = Algorithm::dense;
    CHECK_THROWS_AS(scheme_for(cfg), std::invalid_argument);
}

TEST_CASE("estimate scoring", "[bench]") {
    SparseSpectrum truth(64);
    truth.set(2, {1.0, 0.0});

    SECTION("magnitude ties resolve toward the smaller frequency") {
        SparseSpectrum est(64);
        est.set(2, {1.0, 0.0});
        est.set(5, {1.0, 0.0});
        CHECK(score_estimate(truth, est, 1).support_exact);

        SparseSpectrum est2(64);
        est2.set(2, {1.0, 0.0});
        est2.set(-5, {1.0, 0.0});
        CHECK_FALSE(score_estimate(truth, est2, 1).support_exact);
    }
    SECTION("error magnitudes") {
        SparseSpectrum truth2(64);
        truth2.set(0, {3.0, 4.0});
        const auto q = score_estimate(truth2, SparseSpectrum(64), 2);
        CHECK_FALSE(q.support_exact);
        CHECK(q.avg_l1_support_error == Catch::Approx(2.5));  // 5 / normalizer 2
        CHECK(q.l2_error == Catch::Approx(5.0));

        SparseSpectrum est(64);
        est.set(0, {3.0, 4.0});
        est.set(9, {0.0, 2.0});  // spurious entry counts toward l2 only
        const auto q2 = score_estimate(truth2, est, 2);
        CHECK(q2.avg_l1_support_error == 0.0);
        CHECK(q2.l2_error == Catch::Approx(2.0));
    }
    CHECK_THROWS_AS(score_estimate(truth, truth, 0), std::invalid_argument);
}

TEST_CASE("dense baseline", "[bench]") {
    SparseSpectrum spec(64);
    spec.set(5, {2.0, 0.0});
    spec.set(-3, {0.0, 1.0});
    const SignalModel model{spec};

    const auto full = dense_recover(model, 64, 2);
    REQUIRE(full.estimate.size() == 2);
    CHECK(std::abs(full.estimate.at(5) - cplx{2.0, 0.0}) < 1e-12);
    CHECK(std::abs(full.estimate.at(-3) - cplx{0.0, 1.0}) < 1e-12);
    CHECK(full.diag.samples_used == 64);

    const auto top1 = dense_recover(model, 64, 1);
    REQUIRE(top1.estimate.size() == 1);
    CHECK(std::abs(top1.estimate.at(5) - cplx{2.0, 0.0}) < 1e-12);

    CHECK_THROWS_AS(dense_recover(model, i64{1} << 25, 4), std::invalid_argument);
}

TEST_CASE("trials are a pure function of config and index", "[bench]") {
    auto base = [] {
        TrialConfig cfg;
        cfg.N = 1 << 12;
        cfg.n = 1;
        cfg.B = 4;
        cfg.seed = 99;
        cfg.measure_runtime = false;
        return cfg;
    };

    TrialConfig fast = base();
    fast.algorithm = Algorithm::fast;
    TrialConfig noisy = base();
    noisy.algorithm = Algorithm::fast;
    noisy.snr_db = 20.0;
    noisy.acquisition = AcquisitionMode::alias_direct;
    TrialConfig fastr = base();
    fastr.algorithm = Algorithm::fastr;
    fastr.subset_size = 2;
    TrialConfig gen = base();
    gen.algorithm = Algorithm::general;
    gen.d = 2;
    TrialConfig dense = base();
    dense.algorithm = Algorithm::dense;

    for (const TrialConfig& cfg : {fast, noisy, fastr, gen, dense}) {
        const TrialRecord a = run_trial(cfg, 3, 0);
        const TrialRecord b = run_trial(cfg, 3, 0);
        CHECK(a.runtime_ns == 0);
        CHECK(a.samples_used == b.samples_used);
        CHECK(a.support_exact == b.support_exact);
        CHECK(a.avg_l1_support_error == b.avg_l1_support_error);
        CHECK(a.l2_error == b.l2_error);
        if (cfg.snr_db > 1e9) {  // noiseless trials recover exactly
            CHECK(a.support_exact);
            CHECK(a.l2_error < 1e-9);
        }
    }
}

TEST_CASE("run ids count up from the given origin", "[bench]") {
    TrialConfig cfg;
    cfg.algorithm = Algorithm::fast;
    cfg.N = 1 << 12;
    cfg.n = 1;
    cfg.B = 4;
    cfg.seed = 5;
    cfg.measure_runtime = false;
    const auto rows = run_trials(cfg, 3, 7);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].run_id == 7);
    CHECK(rows[1].run_id == 8);
    CHECK(rows[2].run_id == 9);
    CHECK(rows[0].support_exact);
    CHECK(rows[1].support_exact);
    CHECK(rows[2].support_exact);
}

TEST_CASE("CSV output", "[bench]") {
    CHECK(csv_header ==
          "run_id,algorithm,N,n,B,d,seed,snr_db,samples_used,runtime_ns,"
          "support_exact,avg_l1_support_error,l2_error");

    TrialConfig cfg;
    cfg.algorithm = Algorithm::fast;
    cfg.N = 1 << 12;
    cfg.n = 1;
    cfg.B = 4;
    cfg.seed = 11;
    cfg.measure_runtime = false;
    const auto rows = run_trials(cfg, 2);

    std::ostringstream first, second;
    write_csv(first, rows);
    write_csv(second, rows);
    CHECK(first.str() == second.str());

    const std::string text = first.str();
    CHECK(text.rfind("run_id,algorithm,", 0) == 0);
    CHECK(text.find(",inf,") != std::string::npos);  // noiseless snr column
    CHECK(text.find("\n0,fast,4096,1,4,1,11,inf,") != std::string::npos);

    // First data row, field by field: exact support flag, negligible errors.
    const std::size_t row_start = text.find('\n') + 1;
    const std::string row = text.substr(row_start, text.find('\n', row_start) - row_start);
    std::vector<std::string> fields;
    std::istringstream fs(row);
    for (std::string f; std::getline(fs, f, ',');) fields.push_back(f);
    REQUIRE(fields.size() == 13);
    CHECK(fields[9] == "0");   // runtime disabled
    CHECK(fields[10] == "1");  // support exact
    CHECK(std::stod(fields[11]) < 1e-9);
    CHECK(std::stod(fields[12]) < 1e-9);

    // A hand-filled record renders exactly.
    TrialRecord hand;
    hand.run_id = 3;
    hand.algorithm = "fastr";
    hand.N = 1024;
    hand.n = 2;
    hand.B = 8;
    hand.d = 1;
    hand.seed = 7;
    hand.snr_db = 12.5;
    hand.samples_used = 100;
    hand.runtime_ns = 55;
    hand.support_exact = false;
    hand.avg_l1_support_error = 0.25;
    hand.l2_error = 1.5;
    std::ostringstream third;
    write_csv(third, std::vector<TrialRecord>{hand});
    CHECK(third.str() == std::string(csv_header) + "\n3,fastr,1024,2,8,1,7,12.5,100,55,0,0.25,1.5\n");
}

TEST_CASE("subset-size tuning finds a working size", "[bench]") {
    TrialConfig cfg;
    cfg.algorithm = Algorithm::fastr;
    cfg.N = 1 << 12;
    cfg.n = 1;
    cfg.B = 4;
    cfg.seed = 21;
    cfg.acquisition = AcquisitionMode::alias_direct;

    const std::size_t full = scheme_for(cfg).vote_primes.size();
    const std::size_t tuned = tune_subset_size(cfg, 6, 0.9);
    REQUIRE(tuned >= 1);
    REQUIRE(tuned <= full);

    cfg.subset_size = tuned;
    cfg.measure_runtime = false;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < 6; ++i)
        if (run_trial(cfg, i, 0).support_exact) ++hits;
    CHECK(hits >= 6);  // noiseless trials pass at the tuned size

    TrialConfig wrong = cfg;
    wrong.algorithm = Algorithm::fast;
    CHECK_THROWS_AS(tune_subset_size(wrong, 4, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(tune_subset_size(cfg, 0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(tune_subset_size(cfg, 4, 1.5), std::invalid_argument);
}
