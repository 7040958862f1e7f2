#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "relgrid/circuits.hpp"

using namespace relgrid;

TEST_CASE("hadamard_test exact values") {
    ShotPlan plan = ShotPlan::exact();
    REQUIRE(hadamard_test(uniform_state(3), 1, plan).value ==
            Catch::Approx(1.0).margin(1e-14));
    REQUIRE(hadamard_test(uniform_state(3), 1, plan).std_error == 0.0);

    WaveFunction wave = testutil::plane_wave(3, 1);
    REQUIRE(hadamard_test(wave, 1, plan).value ==
            Catch::Approx(std::cos(2.0 * std::numbers::pi / 8.0)).margin(1e-12));
    REQUIRE(hadamard_test_imag(wave, 1, plan).value ==
            Catch::Approx(std::sin(2.0 * std::numbers::pi / 8.0)).margin(1e-12));
}

TEST_CASE("hadamard_test is half the symmetrised shift expectation") {
    std::mt19937_64 gen(11);
    ShotPlan plan = ShotPlan::exact();
    for (int trial = 0; trial < 10; ++trial) {
        WaveFunction real_psi = testutil::random_real_state(gen, 4);
        WaveFunction cplx_psi = testutil::random_complex_state(gen, 4);
        for (long long l : {1LL, 2LL, 3LL}) {
            REQUIRE(hadamard_test(real_psi, l, plan).value ==
                    Catch::Approx(0.5 * expectation_A_sym(real_psi, l)).margin(1e-12));
            REQUIRE(hadamard_test(cplx_psi, l, plan).value ==
                    Catch::Approx(0.5 * expectation_A_sym(cplx_psi, l)).margin(1e-12));
        }
    }
}

TEST_CASE("hadamard_test shot statistics cover the true value") {
    // True Re<(A^dag)> = 0 for a basis state, so the control qubit is a
    // fair coin; with 1e6 shots the estimate should sit within 5 standard
    // errors in at least 99 of 100 seeds.
    WaveFunction psi = basis_state(3, 0);
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Estimate e = hadamard_test(psi, 1, ShotPlan::shots(1000000, seed));
        REQUIRE(e.std_error == Catch::Approx(0.001).epsilon(0.05));
        if (std::abs(e.value) < 5.0 * e.std_error) ++covered;
    }
    REQUIRE(covered >= 99);
}

TEST_CASE("hadamard_test error shrinks like the square root of the shot count") {
    WaveFunction psi = basis_state(3, 0);
    std::vector<double> log_n, log_se;
    for (long long n : {1000LL, 10000LL, 100000LL, 1000000LL, 10000000LL}) {
        Estimate e = hadamard_test(psi, 1, ShotPlan::shots(n, 424242));
        log_n.push_back(std::log10(static_cast<double>(n)));
        log_se.push_back(std::log10(e.std_error));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(log_n.size());
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_se[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_se[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    REQUIRE(-slope > 0.45);
    REQUIRE(-slope < 0.55);
}

TEST_CASE("shots mode replays identically for a fixed seed") {
    WaveFunction psi = testutil::plane_wave(3, 1);
    Estimate a = hadamard_test(psi, 1, ShotPlan::shots(5000, 7));
    Estimate b = hadamard_test(psi, 1, ShotPlan::shots(5000, 7));
    REQUIRE(a.value == b.value);
    REQUIRE(a.std_error == b.std_error);
    Estimate c = hadamard_test(psi, 1, ShotPlan::shots(5000, 8));
    REQUIRE(a.value != c.value);
}

TEST_CASE("ShotPlan validates the shot count") {
    REQUIRE_THROWS_AS(ShotPlan::shots(0, 1), ConfigError);
    REQUIRE_NOTHROW(ShotPlan::shots(1, 1));
}

TEST_CASE("reference_states_for builds the protocol rows") {
    auto e0 = reference_states_for(EdgeTarget::E0, 3);
    REQUIRE(e0.size() == 3);
    REQUIRE(probability(e0[0].state, 0) == Catch::Approx(1.0));
    REQUIRE(probability(e0[1].state, 7) == Catch::Approx(1.0));
    REQUIRE(probability(e0[2].state, 0) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(probability(e0[2].state, 7) == Catch::Approx(0.5).margin(1e-14));

    auto e1 = reference_states_for(EdgeTarget::E1, 3);
    REQUIRE(probability(e1[0].state, 1) == Catch::Approx(1.0));
    REQUIRE(probability(e1[1].state, 7) == Catch::Approx(1.0));
    REQUIRE(probability(e1[2].state, 1) == Catch::Approx(0.5).margin(1e-14));

    auto e2 = reference_states_for(EdgeTarget::E2, 3);
    REQUIRE(probability(e2[0].state, 0) == Catch::Approx(1.0));
    REQUIRE(probability(e2[1].state, 6) == Catch::Approx(1.0));

    auto e0sq = reference_states_for(EdgeTarget::E0Sq, 3);
    REQUIRE(e0sq.size() == 2);
    REQUIRE(probability(e0sq[0].state, 0) == Catch::Approx(1.0));
    REQUIRE(probability(e0sq[1].state, 7) == Catch::Approx(1.0));
}

TEST_CASE("overlap_probability exact values") {
    ShotPlan plan = ShotPlan::exact();
    WaveFunction uni = uniform_state(3);
    auto refs = reference_states_for(EdgeTarget::E0, 3);
    REQUIRE(overlap_probability(uni, refs[0], plan).value ==
            Catch::Approx(0.125).margin(1e-14));
    REQUIRE(overlap_probability(uni, refs[2], plan).value ==
            Catch::Approx(0.25).margin(1e-14));
    REQUIRE(overlap_probability(basis_state(3, 3), refs[0], plan).value ==
            Catch::Approx(0.0).margin(1e-15));

    WaveFunction small = uniform_state(2);
    REQUIRE_THROWS_AS(overlap_probability(small, refs[0], plan), LengthMismatchError);
}

TEST_CASE("overlap_probability sampling is deterministic and well calibrated") {
    WaveFunction psi = testutil::dirichlet_sine(3);
    auto refs = reference_states_for(EdgeTarget::E0, 3);
    const double truth = overlap_probability(psi, refs[2], ShotPlan::exact()).value;

    Estimate a = overlap_probability(psi, refs[2], ShotPlan::shots(200000, 3));
    Estimate b = overlap_probability(psi, refs[2], ShotPlan::shots(200000, 3));
    REQUIRE(a.value == b.value);
    REQUIRE(std::abs(a.value - truth) < 6.0 * a.std_error);
}

TEST_CASE("estimate_E exact values on reference cases") {
    ShotPlan plan = ShotPlan::exact();
    WaveFunction uni = uniform_state(3);
    REQUIRE(estimate_E(uni, EdgeTarget::E0, plan).value == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(estimate_E(basis_state(3, 0), EdgeTarget::E0Sq, plan).value ==
            Catch::Approx(1.0).margin(1e-14));
    REQUIRE(estimate_E(uni, EdgeTarget::E1, plan, DbcVariant::Full).value ==
            Catch::Approx(0.5).margin(1e-12));
    REQUIRE(estimate_E(uni, EdgeTarget::E1, plan, DbcVariant::PaperLiteral).value ==
            Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("estimate_E reproduces the direct edge expectations") {
    std::mt19937_64 gen(101);
    ShotPlan plan = ShotPlan::exact();
    struct Row {
        EdgeTarget target;
        DbcVariant variant;
        EdgeOp direct;
    };
    const Row rows[] = {
        {EdgeTarget::E0, DbcVariant::Full, EdgeOp::E0},
        {EdgeTarget::E0, DbcVariant::PaperLiteral, EdgeOp::E0},
        {EdgeTarget::E0Sq, DbcVariant::Full, EdgeOp::E0Sq},
        {EdgeTarget::E0Sq, DbcVariant::PaperLiteral, EdgeOp::E0Sq},
        {EdgeTarget::E1, DbcVariant::Full, EdgeOp::E1Full},
        {EdgeTarget::E1, DbcVariant::PaperLiteral, EdgeOp::E1Paper},
        {EdgeTarget::E2, DbcVariant::Full, EdgeOp::E2Full},
        {EdgeTarget::E2, DbcVariant::PaperLiteral, EdgeOp::E2Paper},
    };
    for (int trial = 0; trial < 10; ++trial) {
        // The probability combination recovers the real part of the cross
        // terms, which for these Hermitian operators is the whole
        // expectation; complex states work as well.
        WaveFunction psi = trial % 2 == 0 ? testutil::random_real_state(gen, 3)
                                          : testutil::random_complex_state(gen, 3);
        for (const Row& row : rows) {
            REQUIRE(estimate_E(psi, row.target, plan, row.variant).value ==
                    Catch::Approx(expectation_E(psi, row.direct)).margin(1e-12));
        }
    }
}

TEST_CASE("full-variant corrections reuse the shared-row draws") {
    WaveFunction psi = testutil::dirichlet_sine(4);
    ShotPlan plan = ShotPlan::shots(40000, 99);

    Estimate full = estimate_E(psi, EdgeTarget::E1, plan, DbcVariant::Full);
    Estimate wrap = estimate_E(psi, EdgeTarget::E1, plan, DbcVariant::PaperLiteral);
    auto shared = reference_states_for(EdgeTarget::E0Sq, 4);
    Estimate corner = overlap_probability(psi, shared[0], plan);
    REQUIRE(full.value - wrap.value == Catch::Approx(2.0 * corner.value).margin(1e-15));

    Estimate full2 = estimate_E(psi, EdgeTarget::E2, plan, DbcVariant::Full);
    Estimate wrap2 = estimate_E(psi, EdgeTarget::E2, plan, DbcVariant::PaperLiteral);
    Estimate corner2 = overlap_probability(psi, shared[1], plan);
    REQUIRE(full2.value - wrap2.value == Catch::Approx(2.0 * corner2.value).margin(1e-15));
}

TEST_CASE("circuit outputs are invariant under a global phase") {
    std::mt19937_64 gen(202);
    std::vector<Complex> raw(16);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& c : raw) c = Complex{dist(gen), dist(gen)};
    WaveFunction psi = make_state(raw);
    const Complex phase = std::polar(1.0, 1.234567);
    std::vector<Complex> rotated(16);
    for (std::size_t j = 0; j < 16; ++j) rotated[j] = raw[j] * phase;
    WaveFunction psi2 = make_state(rotated);

    ShotPlan exact = ShotPlan::exact();
    ShotPlan shots = ShotPlan::shots(5000, 55);
    for (const ShotPlan& plan : {exact, shots}) {
        REQUIRE(hadamard_test(psi, 1, plan).value ==
                Catch::Approx(hadamard_test(psi2, 1, plan).value).margin(1e-12));
        auto refs = reference_states_for(EdgeTarget::E0, 4);
        REQUIRE(overlap_probability(psi, refs[2], plan).value ==
                Catch::Approx(overlap_probability(psi2, refs[2], plan).value).margin(1e-12));
        REQUIRE(estimate_E(psi, EdgeTarget::E0, plan).value ==
                Catch::Approx(estimate_E(psi2, EdgeTarget::E0, plan).value).margin(1e-12));
    }
}

TEST_CASE("estimate_E error propagation in quadrature") {
    WaveFunction psi = testutil::dirichlet_sine(3);
    ShotPlan plan = ShotPlan::shots(10000, 5);
    auto refs = reference_states_for(EdgeTarget::E0, 3);
    Estimate pf = overlap_probability(psi, refs[0], plan);
    Estimate pg = overlap_probability(psi, refs[1], plan);
    Estimate ps = overlap_probability(psi, refs[2], plan);
    Estimate e0 = estimate_E(psi, EdgeTarget::E0, plan);
    REQUIRE(e0.value ==
            Catch::Approx(2.0 * ps.value - pf.value - pg.value).margin(1e-15));
    const double expected_se = std::sqrt(4.0 * ps.std_error * ps.std_error +
                                         pf.std_error * pf.std_error +
                                         pg.std_error * pg.std_error);
    REQUIRE(e0.std_error == Catch::Approx(expected_se).margin(1e-15));
}
