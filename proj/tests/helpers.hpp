#pragma once

// Shared fixtures for the unit suites: random states and small analytic
// profiles used across modules.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "relgrid/grid.hpp"

namespace testutil {

inline relgrid::WaveFunction random_complex_state(std::mt19937_64& gen, int qubits) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<relgrid::Complex> raw(std::size_t{1} << qubits);
    for (auto& c : raw) c = relgrid::Complex{dist(gen), dist(gen)};
    return relgrid::make_state(raw);
}

inline relgrid::WaveFunction random_real_state(std::mt19937_64& gen, int qubits) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<relgrid::Complex> raw(std::size_t{1} << qubits);
    for (auto& c : raw) c = relgrid::Complex{dist(gen), 0.0};
    return relgrid::make_state(raw);
}

// Plane wave c_j proportional to exp(2 pi i k j / N).
inline relgrid::WaveFunction plane_wave(int qubits, int k) {
    const std::size_t n = std::size_t{1} << qubits;
    std::vector<relgrid::Complex> raw(n);
    for (std::size_t j = 0; j < n; ++j) {
        raw[j] = std::exp(relgrid::Complex{
            0.0, 2.0 * std::numbers::pi * double(k) * double(j) / double(n)});
    }
    return relgrid::make_state(raw);
}

// Hard-wall mode c_j proportional to sin(k pi (j+1) / (N+1)); the ground
// state of the open-chain second-difference matrix for k=1.
inline relgrid::WaveFunction dirichlet_sine(int qubits, int k = 1) {
    const std::size_t n = std::size_t{1} << qubits;
    std::vector<relgrid::Complex> raw(n);
    for (std::size_t j = 0; j < n; ++j) {
        raw[j] = std::sin(std::numbers::pi * double(k) * double(j + 1) / double(n + 1));
    }
    return relgrid::make_state(raw);
}

}  // namespace testutil
