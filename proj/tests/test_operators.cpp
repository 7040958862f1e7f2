#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "relgrid/operators.hpp"

using namespace relgrid;

TEST_CASE("apply_shift wraps the last site onto the first") {
    WaveFunction out = apply_shift(basis_state(3, 7), 1, ShiftDirection::Forward);
    REQUIRE(probability(out, 0) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("apply_shift leaves the uniform state unchanged") {
    WaveFunction psi = uniform_state(3);
    for (long long p : {0LL, 1LL, 3LL, 8LL, 13LL}) {
        WaveFunction out = apply_shift(psi, p, ShiftDirection::Forward);
        for (std::size_t j = 0; j < 8; ++j) {
            REQUIRE(out.amplitudes[j] == psi.amplitudes[j]);
        }
    }
}

TEST_CASE("apply_shift multiplies a plane wave by a pure phase") {
    WaveFunction psi = testutil::plane_wave(3, 1);
    WaveFunction out = apply_shift(psi, 1, ShiftDirection::Forward);
    const Complex phase = std::exp(Complex{0.0, -2.0 * std::numbers::pi / 8.0});
    for (std::size_t j = 0; j < 8; ++j) {
        REQUIRE(std::abs(out.amplitudes[j] - phase * psi.amplitudes[j]) < 1e-14);
    }
    // <psi|A|psi> is that same phase; expectation_A returns the conjugate
    // (the backward-shift expectation).
    Complex a_dag = expectation_A(psi, 1);
    REQUIRE(a_dag.real() == Catch::Approx(std::cos(2.0 * std::numbers::pi / 8.0)).margin(1e-14));
    REQUIRE(a_dag.imag() == Catch::Approx(std::sin(2.0 * std::numbers::pi / 8.0)).margin(1e-14));
    REQUIRE(expectation_A_sym(psi, 1) == Catch::Approx(std::sqrt(2.0)).margin(1e-13));
}

TEST_CASE("apply_shift forward then backward is the identity") {
    std::mt19937_64 gen(5);
    WaveFunction psi = testutil::random_complex_state(gen, 4);
    for (long long p : {1LL, 2LL, 7LL, 16LL, 21LL}) {
        WaveFunction round =
            apply_shift(apply_shift(psi, p, ShiftDirection::Forward), p, ShiftDirection::Backward);
        for (std::size_t j = 0; j < psi.size(); ++j) {
            REQUIRE(round.amplitudes[j] == psi.amplitudes[j]);
        }
    }
    REQUIRE_THROWS_AS(apply_shift(psi, -1, ShiftDirection::Forward), IndexOutOfRangeError);
}

TEST_CASE("expectation_A on reference states") {
    REQUIRE(std::abs(expectation_A(uniform_state(3), 1) - Complex{1.0, 0.0}) < 1e-14);
    REQUIRE(std::abs(expectation_A(basis_state(3, 3), 1)) < 1e-15);
    REQUIRE_THROWS_AS(expectation_A(uniform_state(3), 0), IndexOutOfRangeError);
}

TEST_CASE("expectation_A matches the dense shift matrix on random states") {
    std::mt19937_64 gen(17);
    for (long long l : {1LL, 2LL, 3LL}) {
        Eigen::MatrixXd fwd = build_shift_matrix(4, l, ShiftDirection::Forward);
        for (int trial = 0; trial < 8; ++trial) {
            WaveFunction psi = testutil::random_complex_state(gen, 4);
            Eigen::VectorXcd v(16);
            for (int j = 0; j < 16; ++j) v(j) = psi.amplitudes[static_cast<std::size_t>(j)];
            // <(A^dag)^l> = conj(<A^l>)
            Complex direct = std::conj(Complex(v.dot(fwd.cast<Complex>() * v)));
            REQUIRE(std::abs(expectation_A(psi, l) - direct) < 1e-12);
        }
    }
}

TEST_CASE("edge operator expectations on the uniform state") {
    WaveFunction psi = uniform_state(3);
    REQUIRE(expectation_E(psi, EdgeOp::E0) == Catch::Approx(0.25).margin(1e-14));
    REQUIRE(expectation_E(psi, EdgeOp::E0Sq) == Catch::Approx(0.25).margin(1e-14));
    REQUIRE(expectation_E(psi, EdgeOp::E1Paper) == Catch::Approx(0.25).margin(1e-14));
    REQUIRE(expectation_E(psi, EdgeOp::E1Full) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(expectation_E(psi, EdgeOp::E2Paper) == Catch::Approx(0.25).margin(1e-14));
    REQUIRE(expectation_E(psi, EdgeOp::E2Full) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("edge operator expectations on basis states") {
    WaveFunction zero = basis_state(3, 0);
    REQUIRE(expectation_E(zero, EdgeOp::E0) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(expectation_E(zero, EdgeOp::E0Sq) == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(expectation_E(zero, EdgeOp::E1Full) == Catch::Approx(2.0).margin(1e-15));
    REQUIRE(expectation_E(zero, EdgeOp::E1Paper) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("edge operator expectations match their dense matrices") {
    std::mt19937_64 gen(23);
    for (auto which : {EdgeOp::E0, EdgeOp::E1Full, EdgeOp::E2Full, EdgeOp::E0Sq,
                       EdgeOp::E1Paper, EdgeOp::E2Paper}) {
        LatticeOperator op = build_edge_matrix(4, which);
        REQUIRE((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        for (int trial = 0; trial < 8; ++trial) {
            WaveFunction psi = testutil::random_complex_state(gen, 4);
            REQUIRE(expectation_E(psi, which) ==
                    Catch::Approx(expectation(op, psi)).margin(1e-12));
        }
    }
}

TEST_CASE("quadratic form matches the complex sesquilinear form") {
    std::mt19937_64 gen(31);
    PhysicsConfig config = PhysicsConfig::from_compton_ratio(1.0, 1.0, 4, 0.5);
    LatticeOperator p2 = build_p2_matrix(config, BoundaryCondition::PBC);
    for (int trial = 0; trial < 8; ++trial) {
        WaveFunction psi = testutil::random_complex_state(gen, 4);
        Eigen::VectorXcd v(16);
        for (int j = 0; j < 16; ++j) v(j) = psi.amplitudes[static_cast<std::size_t>(j)];
        Complex direct = v.dot(p2.matrix.cast<Complex>() * v);
        REQUIRE(std::abs(direct.imag()) < 1e-12);
        REQUIRE(expectation(p2, psi) == Catch::Approx(direct.real()).margin(1e-12));
    }
    WaveFunction small = uniform_state(2);
    REQUIRE_THROWS_AS(expectation(p2, small), LengthMismatchError);
}

TEST_CASE("build_p2_matrix stencils") {
    PhysicsConfig config = PhysicsConfig::from_compton_ratio(1.0, 1.0, 2, 1.0);

    LatticeOperator pbc = build_p2_matrix(config, BoundaryCondition::PBC);
    Eigen::Matrix4d expected;
    expected << 2, -1, 0, -1,
                -1, 2, -1, 0,
                0, -1, 2, -1,
                -1, 0, -1, 2;
    REQUIRE((pbc.matrix - expected).cwiseAbs().maxCoeff() < 1e-14);

    LatticeOperator dbc = build_p2_matrix(config, BoundaryCondition::DBC);
    REQUIRE(dbc.matrix(0, 3) == 0.0);
    REQUIRE(dbc.matrix(3, 0) == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dbc.matrix);
    REQUIRE(solver.eigenvalues()(0) ==
            Catch::Approx(2.0 - 2.0 * std::cos(std::numbers::pi / 5.0)).margin(1e-10));
}

TEST_CASE("p2 matrices are banded as expected") {
    PhysicsConfig config = PhysicsConfig::from_compton_ratio(1.0, 1.0, 4, 0.7);
    LatticeOperator pbc = build_p2_matrix(config, BoundaryCondition::PBC);
    LatticeOperator dbc = build_p2_matrix(config, BoundaryCondition::DBC);
    const auto n = static_cast<Eigen::Index>(config.grid_points());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool corner = (i == 0 && j == n - 1) || (i == n - 1 && j == 0);
            if (std::abs(i - j) <= 1) continue;
            if (corner) {
                REQUIRE(pbc.matrix(i, j) != 0.0);
                REQUIRE(dbc.matrix(i, j) == 0.0);
            } else {
                REQUIRE(pbc.matrix(i, j) == 0.0);
                REQUIRE(dbc.matrix(i, j) == 0.0);
            }
        }
    }
}

TEST_CASE("p2 spectra match the analytic dispersion relations") {
    PhysicsConfig config = PhysicsConfig::from_compton_ratio(1.0, 1.0, 3, 0.4);
    const double s2 = std::pow(config.mass * config.light_speed * 0.4, 2);
    const auto n = static_cast<int>(config.grid_points());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pbc(
        build_p2_matrix(config, BoundaryCondition::PBC).matrix);
    std::vector<double> expected_pbc;
    for (int k = 0; k < n; ++k) {
        expected_pbc.push_back(s2 * (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n)));
    }
    std::sort(expected_pbc.begin(), expected_pbc.end());
    for (int k = 0; k < n; ++k) {
        REQUIRE(pbc.eigenvalues()(k) == Catch::Approx(expected_pbc[std::size_t(k)]).margin(1e-10));
    }
    REQUIRE(pbc.eigenvalues()(0) == Catch::Approx(0.0).margin(1e-12));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dbc(
        build_p2_matrix(config, BoundaryCondition::DBC).matrix);
    for (int k = 0; k < n; ++k) {
        const double ev = s2 * (2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1)));
        REQUIRE(dbc.eigenvalues()(k) == Catch::Approx(ev).margin(1e-10));
    }
    // Hard walls lift the zero mode.
    REQUIRE(dbc.eigenvalues()(0) > 0.0);
}

TEST_CASE("build_kinetic_matrix order 1 is p2 over 2m") {
    PhysicsConfig config = PhysicsConfig::from_compton_ratio(2.0, 1.0, 3, 0.3);
    for (auto bc : {BoundaryCondition::PBC, BoundaryCondition::DBC}) {
        Eigen::MatrixXd k1 = build_kinetic_matrix(config, bc, 1).matrix;
        Eigen::MatrixXd p2 = build_p2_matrix(config, bc).matrix;
        REQUIRE((k1 - p2 / (2.0 * config.mass)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("build_kinetic_matrix is Hermitian and annihilates the uniform state under PBC") {
    PhysicsConfig config = PhysicsConfig::from_compton_ratio(1.0, 1.0, 4, 0.2);
    for (int order : {1, 2, 3}) {
        LatticeOperator k = build_kinetic_matrix(config, BoundaryCondition::PBC, order);
        REQUIRE((k.matrix - k.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        REQUIRE(expectation(k, uniform_state(4)) == Catch::Approx(0.0).margin(1e-13));
    }
    REQUIRE_THROWS_AS(build_kinetic_matrix(config, BoundaryCondition::PBC, 0),
                      UnsupportedOrderError);
    REQUIRE_THROWS_AS(build_kinetic_matrix(config, BoundaryCondition::PBC, 4),
                      UnsupportedOrderError);
}

TEST_CASE("dense builders reject oversized grids") {
    REQUIRE_THROWS_AS(build_shift_matrix(11, 1, ShiftDirection::Forward), TooLargeError);
    PhysicsConfig config(1.0, 1.0, 1.0, 11);
    REQUIRE_THROWS_AS(build_p2_matrix(config, BoundaryCondition::PBC), TooLargeError);
    REQUIRE_NOTHROW(build_shift_matrix(10, 1, ShiftDirection::Forward));
}

TEST_CASE("shift matrices act like apply_shift") {
    std::mt19937_64 gen(47);
    WaveFunction psi = testutil::random_complex_state(gen, 3);
    Eigen::VectorXcd v(8);
    for (int j = 0; j < 8; ++j) v(j) = psi.amplitudes[static_cast<std::size_t>(j)];
    for (long long p : {1LL, 2LL, 5LL}) {
        Eigen::VectorXcd shifted =
            build_shift_matrix(3, p, ShiftDirection::Forward).cast<Complex>() * v;
        WaveFunction direct = apply_shift(psi, p, ShiftDirection::Forward);
        for (int j = 0; j < 8; ++j) {
            REQUIRE(std::abs(shifted(j) - direct.amplitudes[static_cast<std::size_t>(j)]) <
                    1e-14);
        }
    }
}

TEST_CASE("squared edge-corrected shift obeys the full-operator expansion") {
    // <(B - E0)^2> = <B^2> + 4<E0> - <E1full> - <E2full> + <E0sq>
    // for B = A_sym(1) - 2. The wrap-only variant overshoots by 2(P_0 + P_{N-1}).
    std::mt19937_64 gen(61);
    const int qubits = 4;
    const auto n = static_cast<Eigen::Index>(std::size_t{1} << qubits);
    Eigen::MatrixXd b =
        build_a_sym_matrix(qubits, 1).matrix - 2.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd e0 = build_edge_matrix(qubits, EdgeOp::E0).matrix;
    LatticeOperator lhs{(b - e0) * (b - e0), "squared", BoundaryCondition::DBC};
    LatticeOperator bsq{b * b, "b_squared", BoundaryCondition::PBC};

    for (int trial = 0; trial < 12; ++trial) {
        WaveFunction psi = testutil::random_complex_state(gen, qubits);
        const double exact = expectation(lhs, psi);
        const double via_full = expectation(bsq, psi) + 4.0 * expectation_E(psi, EdgeOp::E0) -
                                expectation_E(psi, EdgeOp::E1Full) -
                                expectation_E(psi, EdgeOp::E2Full) +
                                expectation_E(psi, EdgeOp::E0Sq);
        REQUIRE(via_full == Catch::Approx(exact).margin(1e-12));

        const double via_wrap = expectation(bsq, psi) + 4.0 * expectation_E(psi, EdgeOp::E0) -
                                expectation_E(psi, EdgeOp::E1Paper) -
                                expectation_E(psi, EdgeOp::E2Paper) +
                                expectation_E(psi, EdgeOp::E0Sq);
        const double edge_weight = 2.0 * (probability(psi, 0) + probability(psi, 15));
        REQUIRE(via_wrap - exact == Catch::Approx(edge_weight).margin(1e-12));
    }
}

TEST_CASE("full edge operators are the adder products they abbreviate") {
    const int qubits = 3;
    Eigen::MatrixXd a = build_shift_matrix(qubits, 1, ShiftDirection::Forward);
    Eigen::MatrixXd e0 = build_edge_matrix(qubits, EdgeOp::E0).matrix;
    Eigen::MatrixXd e1 = a * e0 + e0 * a.transpose();
    Eigen::MatrixXd e2 = e0 * a + a.transpose() * e0;
    REQUIRE((e1 - build_edge_matrix(qubits, EdgeOp::E1Full).matrix).cwiseAbs().maxCoeff() <
            1e-14);
    REQUIRE((e2 - build_edge_matrix(qubits, EdgeOp::E2Full).matrix).cwiseAbs().maxCoeff() <
            1e-14);
    Eigen::MatrixXd e0sq = e0 * e0;
    REQUIRE((e0sq - build_edge_matrix(qubits, EdgeOp::E0Sq).matrix).cwiseAbs().maxCoeff() <
            1e-14);
}
