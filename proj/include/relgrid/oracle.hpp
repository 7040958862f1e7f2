#pragma once

// Independent ground truth for the estimator and VQE paths: dense
// diagonalisation of lattice Hamiltonians, closed-form p^2 spectra, and the
// exact square-root kinetic energy built as a matrix function.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "relgrid/errors.hpp"
#include "relgrid/estimators.hpp"
#include "relgrid/grid.hpp"
#include "relgrid/operators.hpp"

namespace relgrid {

enum class SpectralMethod { Dense, Analytic };

struct SpectralResult {
    std::vector<double> eigenvalues;  // ascending
    double ground_energy = 0.0;
    WaveFunction ground_vector;
    SpectralMethod method = SpectralMethod::Dense;
};

namespace detail {

inline Eigen::MatrixXd potential_diagonal(const PotentialSpec& pot, Eigen::Index n) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        v(j, j) = pot.scale * pot.weights[static_cast<std::size_t>(j)] + pot.offset;
    }
    return v;
}

inline SpectralResult diagonalise(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    SpectralResult result;
    const Eigen::Index n = h.rows();
    result.eigenvalues.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        result.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    }
    result.ground_energy = solver.eigenvalues()(0);
    std::vector<Complex> raw(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        raw[static_cast<std::size_t>(j)] = Complex{solver.eigenvectors()(j, 0), 0.0};
    }
    result.ground_vector = make_state(raw);
    result.method = SpectralMethod::Dense;
    return result;
}

}  // namespace detail

// Ground state of the order-truncated lattice Hamiltonian K_order + V.
inline SpectralResult exact_ground(const PhysicsConfig& config, BoundaryCondition bc, int order,
                                   const PotentialSpec& pot) {
    check_dense_size(config.qubits);
    pot.validate(config.grid_points());
    Eigen::MatrixXd h = build_kinetic_matrix(config, bc, order).matrix +
                        detail::potential_diagonal(pot,
                                                   static_cast<Eigen::Index>(config.grid_points()));
    return detail::diagonalise(h);
}

// Closed-form p^2 spectra of the two stencils, ascending.
// PBC: (mc r)^2 (2 - 2 cos(2 pi k / N)), k = 0..N-1.
// DBC: (mc r)^2 (2 - 2 cos(k pi / (N+1))), k = 1..N.
inline std::vector<double> analytic_p2_spectrum(const PhysicsConfig& config,
                                                BoundaryCondition bc) {
    const std::size_t n = config.grid_points();
    const double s = config.mass * config.light_speed * config.compton_ratio();
    const double s2 = s * s;
    std::vector<double> spectrum(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = bc == BoundaryCondition::PBC
                                 ? 2.0 * std::numbers::pi * double(k) / double(n)
                                 : std::numbers::pi * double(k + 1) / double(n + 1);
        spectrum[k] = s2 * (2.0 - 2.0 * std::cos(angle));
    }
    std::sort(spectrum.begin(), spectrum.end());
    return spectrum;
}

// Non-perturbative kinetic operator mc^2 (sqrt(1 + P2/(m^2 c^2)) - 1) via the
// spectral decomposition of the lattice p^2 (Hermitian PSD, so the square
// root is well defined).
inline LatticeOperator build_sqrt_kinetic_matrix(const PhysicsConfig& config,
                                                 BoundaryCondition bc) {
    check_dense_size(config.qubits);
    const double mc = config.mass * config.light_speed;
    const double mc2 = config.rest_energy();
    LatticeOperator p2 = build_p2_matrix(config, bc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p2.matrix);
    Eigen::VectorXd f = solver.eigenvalues();
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        f(k) = mc2 * (std::sqrt(1.0 + std::max(0.0, f(k)) / (mc * mc)) - 1.0);
    }
    return LatticeOperator{
        solver.eigenvectors() * f.asDiagonal() * solver.eigenvectors().transpose(),
        "kinetic_sqrt", bc};
}

// Ground state of the exact square-root kinetic energy plus potential: the
// reference the truncated series is judged against.
inline SpectralResult exact_sqrt_kinetic_ground(const PhysicsConfig& config,
                                                BoundaryCondition bc,
                                                const PotentialSpec& pot) {
    check_dense_size(config.qubits);
    pot.validate(config.grid_points());
    Eigen::MatrixXd h = build_sqrt_kinetic_matrix(config, bc).matrix +
                        detail::potential_diagonal(pot,
                                                   static_cast<Eigen::Index>(config.grid_points()));
    return detail::diagonalise(h);
}

// Upper bound on the series-truncation error after the given order: the
// first dropped term, alpha_{order+1} y^{order+1} mc^2, evaluated at the
// largest p^2 eigenvalue (both operators are functions of the same p^2, so
// eigenvalue gaps are bounded by the scalar remainder over the spectrum,
// and the remainder of the alternating series is at most its first dropped
// term while y <= 1).
inline double truncation_bound(const PhysicsConfig& config, BoundaryCondition bc, int order) {
    if (order < 1 || order > 2) {
        throw UnsupportedOrderError("truncation bounds cover orders 1 and 2, got " +
                                    std::to_string(order));
    }
    const double mc = config.mass * config.light_speed;
    const double y_max = analytic_p2_spectrum(config, bc).back() / (mc * mc);
    double term = alpha(order + 1) * config.rest_energy();
    for (int i = 0; i <= order; ++i) term *= y_max;
    return term;
}

inline double truncation_bound_order2(const PhysicsConfig& config, BoundaryCondition bc) {
    return truncation_bound(config, bc, 2);
}

}  // namespace relgrid
