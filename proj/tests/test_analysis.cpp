#include <doctest.h>

#include <cmath>

#include "chirpcs/analysis.hpp"

using namespace chirpcs;

TEST_CASE("strip_ratio: single column and same-P pair are exact isometries") {
    const DGFrame frame(FrameParams(5, 0));
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        SparseSignal sig;
        sig.support = {frame.sample_index(rng)};
        sig.coefficients = {rng.next_unit_phase()};
        CHECK(strip_ratio(frame, sig) == doctest::Approx(1.0).epsilon(1e-13));

        SparseSignal pair;
        const ColumnIndex first = frame.sample_index(rng);
        pair.support = {first, ColumnIndex{first.dg_coeffs, first.b ^ BitVec(0b11, 5)}};
        pair.coefficients = {rng.next_unit_phase(), rng.next_unit_phase()};
        CHECK(strip_ratio(frame, pair) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SparseSignal zero;
    zero.support = {ColumnIndex{0, BitVec::zero(5)}};
    zero.coefficients = {0.0};
    CHECK_THROWS_AS(strip_ratio(frame, zero), std::invalid_argument);
}

TEST_CASE("strip delta bound matches a hand-computed value") {
    // m=11, r=0, k=4, eps=0.5: exponent = (eps - 3/(C-1))^2 2048 / 128 = ~4
    const FrameParams p(11, 0);
    const double delta = strip_delta_bound(p, 4, 0.5);
    CHECK(delta == doctest::Approx(2.0 * std::exp(-4.0)).epsilon(1e-4));
    CHECK_THROWS_AS(strip_delta_bound(p, 3000000, 1e-9), std::invalid_argument);
}

TEST_CASE("strip_montecarlo: k=1 never violates; huge epsilon never violates") {
    const DGFrame frame(FrameParams(7, 0));
    StripParams sp;
    sp.k = 1;
    sp.epsilon = 0.5;
    sp.trials = 50;
    const StripResult res = strip_montecarlo(frame, sp, 99);
    CHECK(res.violation_rate == 0.0);
    CHECK(res.within_bound);

    StripParams loose;
    loose.k = 3;
    loose.epsilon = 3.0;  // >= k - 1 + 1: the Cauchy-Schwarz ceiling makes violations impossible
    loose.trials = 50;
    CHECK(strip_montecarlo(frame, loose, 99).violation_rate == 0.0);
}

TEST_CASE("strip_montecarlo: mean ratio sanity floor and determinism") {
    const DGFrame frame(FrameParams(9, 0));
    StripParams sp;
    sp.k = 4;
    sp.epsilon = 0.5;
    sp.trials = 400;
    const StripResult a = strip_montecarlo(frame, sp, 7, 2);
    CHECK(std::abs(a.mean_ratio - 1.0) <= 5.0 / std::sqrt(400.0 * 4.0));

    const StripResult b = strip_montecarlo(frame, sp, 7, 1);
    REQUIRE(a.records.size() == b.records.size());
    CHECK(to_csv(a.records) == to_csv(b.records));  // jobs must not change the artifact
    const StripResult c = strip_montecarlo(frame, sp, 8);
    CHECK(to_csv(a.records) != to_csv(c.records));
}

TEST_CASE("strip_montecarlo with real-gaussian coefficients stays within bound") {
    const DGFrame frame(FrameParams(9, 0));
    StripParams sp;
    sp.k = 3;
    sp.epsilon = 0.6;
    sp.trials = 200;
    sp.model = CoefficientModel::kRealGaussian;
    const StripResult res = strip_montecarlo(frame, sp, 123);
    CHECK(res.within_bound);
}

TEST_CASE("expected cross-term Gamma is exactly zero (m=3, r=0, all a and l)") {
    const DGFrame frame(FrameParams(3, 0));
    for (std::uint64_t aw = 1; aw < 8; ++aw)
        for (std::uint64_t lw = 0; lw < 8; ++lw)
            CHECK(expected_gamma(frame, BitVec(aw, 3), BitVec(lw, 3)).is_zero());
    CHECK_THROWS_AS(expected_gamma(frame, BitVec::zero(3), BitVec::zero(3)),
                    std::invalid_argument);
}

TEST_CASE("expected cross-term Gamma is exactly zero (m=3, r=1, spot case)") {
    const DGFrame frame(FrameParams(3, 1));
    CHECK(expected_gamma(frame, BitVec(1, 3), BitVec::zero(3)).is_zero());
}

TEST_CASE("zero-mean cross-term certificate (m=3, both r)") {
    for (int r : {0, 1}) {
        const DGFrame frame(FrameParams(3, r));
        const auto cert = verify_zero_mean_cross_terms(frame);
        CHECK(cert.pass);
        CHECK(cert.pairs_checked == 7 * 8);
    }
}

TEST_CASE("gamma_experiment: bound holds and the eta-exponent rate is no larger") {
    const DGFrame frame(FrameParams(7, 1));
    const auto res = gamma_experiment(frame, 3, 0.05, 60, 4242, 2);
    CHECK(res.within_bound);
    // r > 0: N^(1-2r/m) <= N^(1-r/m), so the eta bound is larger and easier
    CHECK(res.exceed_rate_eta <= res.exceed_rate_r);
    CHECK_THROWS_AS(gamma_experiment(frame, 1, 0.05, 10, 1), std::invalid_argument);
}

TEST_CASE("gamma spectrum of a shared-P support concentrates on k(k-1) bins") {
    const DGFrame frame(FrameParams(5, 0));
    const int k = 3;
    const std::uint64_t coeffs = 0b00110;
    std::vector<ChirpColumn> cols;
    for (std::uint64_t bw : {1ull, 6ull, 20ull})
        cols.push_back(frame.column(ColumnIndex{coeffs, BitVec(bw, 5)}));

    std::vector<cplx> u(32, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            for (std::size_t x = 0; x < 32; ++x) {
                const int e = cols[static_cast<std::size_t>(i)].global_phase +
                              cols[static_cast<std::size_t>(i)].exponents[x ^ 1] -
                              cols[static_cast<std::size_t>(j)].global_phase -
                              cols[static_cast<std::size_t>(j)].exponents[x] + 8;
                u[x] += GaussInt::unit_power(e).to_complex();
            }
        }
    fwht(u);
    int live = 0;
    for (const auto& z : u)
        if (std::abs(z) > 1e-9) ++live;
    CHECK(live <= k * (k - 1));
}

TEST_CASE("l2l2_experiment: noiseless recovery is exact when the support lands") {
    const DGFrame frame(FrameParams(5, 0));
    const NoiseModel noise{0.0, 0.0};
    const auto res = l2l2_experiment(frame, 3, noise, 0.5, 40, 31337);
    CHECK(res.materialized);
    // N = 32 with three equal-magnitude components is the decoder's hardest
    // regime; the support can miss on a small fraction of instances
    CHECK(res.support_rate >= 0.95);
    CHECK(res.folding_rate >= res.support_rate);
    // every support-recovered trial must be exact to fp accuracy
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& rec = res.records[i];
        if (rec.metric_name != "support_recovered" || rec.value != 1.0) continue;
        for (const auto& other : res.records)
            if (other.trial_id == rec.trial_id && other.metric_name == "l2l2_error") {
                CHECK(other.value <= 1e-9);
                CHECK(other.pass);
            }
    }
}

TEST_CASE("recovery_experiment: deterministic records and respected budget") {
    const DGFrame frame(FrameParams(7, 0));
    const auto a = recovery_experiment(frame, 3, 60, 777, 0.0, 1.0, {}, 2);
    CHECK(a.support_rate >= 0.9);
    CHECK(a.budget_respected);
    CHECK(a.max_coeff_error <= 1e-8);
    const auto b = recovery_experiment(frame, 3, 60, 777, 0.0, 1.0, {}, 1);
    CHECK(to_csv(a.records) == to_csv(b.records));
}

TEST_CASE("verify_suite: seven passing checks at m=3") {
    for (int r : {0, 1}) {
        const SuiteReport report = verify_suite(3, r);
        CHECK(report.checks.size() == 7);
        CHECK(report.pass);
        CHECK(report.elapsed_ms < 5000.0);
    }
    CHECK_THROWS_AS(verify_suite(4, 0), std::invalid_argument);
}

TEST_CASE("csv format is versioned and stable") {
    std::vector<ExperimentRecord> recs = {
        {0, 3, 1, 2, 42, "metric", 0.5, 1.0, true},
        {1, 3, 1, 2, 42, "metric", 1.5, 1.0, false},
    };
    const std::string csv = to_csv(recs);
    CHECK(csv.find("# cscli-csv v1\n") == 0);
    CHECK(csv.find("trial_id,m,r,k,seed,metric_name,value,bound,pass\n") != std::string::npos);
    CHECK(csv.find("0,3,1,2,42,metric,0.5,1,1\n") != std::string::npos);
    CHECK(csv.find("1,3,1,2,42,metric,1.5,1,0\n") != std::string::npos);
}
