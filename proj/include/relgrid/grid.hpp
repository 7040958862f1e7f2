#pragma once

// Discretised position-space state on a 2^L point grid over x in [0,1),
// plus the physical parameters that fix the lattice scales.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "relgrid/errors.hpp"

namespace relgrid {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;

// Physical parameters of the scaled problem. All quantities are in the
// dimensionless coordinate system where the position range is [0,1);
// mass, light_speed and planck are free positive reals of the scaled
// problem, so the Compton wavelength below is likewise a scaled length.
struct PhysicsConfig {
    double mass = 1.0;
    double light_speed = 1.0;
    double planck = 1.0;
    int qubits = 2;

    PhysicsConfig() = default;

    PhysicsConfig(double m, double c, double hbar, int L)
        : mass(m), light_speed(c), planck(hbar), qubits(L) {
        validate();
    }

    // Convenience constructor fixing the Compton-to-grid ratio directly:
    // hbar is derived so that compton_ratio() == ratio for this L.
    static PhysicsConfig from_compton_ratio(double m, double c, int L, double ratio) {
        if (ratio <= 0.0) throw ConfigError("compton_ratio must be positive");
        const double dx = std::ldexp(1.0, -L);
        return PhysicsConfig(m, c, ratio * dx * m * c, L);
    }

    void validate() const {
        if (qubits < 2) throw ConfigError("qubits must be >= 2 (grid needs at least 4 points)");
        if (qubits > 30) throw ConfigError("qubits too large for a statevector grid");
        if (!(mass > 0.0)) throw ConfigError("mass must be strictly positive");
        if (!(light_speed > 0.0)) throw ConfigError("light_speed must be strictly positive");
        if (!(planck > 0.0)) throw ConfigError("planck must be strictly positive");
    }

    std::size_t grid_points() const { return std::size_t{1} << qubits; }

    // delta_x = 2^-L exactly.
    double delta_x() const { return std::ldexp(1.0, -qubits); }

    // Reduced Compton wavelength hbar/(m c), in scaled units.
    double compton_wavelength() const { return planck / (mass * light_speed); }

    // Dimensionless ratio of Compton wavelength to grid spacing,
    // compton_wavelength * 2^L exactly.
    double compton_ratio() const { return compton_wavelength() * std::ldexp(1.0, qubits); }

    double rest_energy() const { return mass * light_speed * light_speed; }

    double grid_point(std::size_t j) const { return static_cast<double>(j) * delta_x(); }
};

// Normalized amplitude vector over the 2^L grid points. Immutable after
// construction; share freely across threads for read-only evaluation.
struct WaveFunction {
    std::vector<Complex> amplitudes;
    int qubits = 0;
    // Scale factor applied during normalisation (1/original_norm).
    double renormalization = 1.0;

    std::size_t size() const { return amplitudes.size(); }

    double norm_squared() const {
        double s = 0.0;
        for (const Complex& c : amplitudes) s += std::norm(c);
        return s;
    }

    // True when every amplitude has negligible imaginary part.
    bool is_real(double tol = kNormTolerance) const {
        for (const Complex& c : amplitudes) {
            if (std::abs(c.imag()) > tol) return false;
        }
        return true;
    }
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
    int l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

}  // namespace detail

// Builds a normalized WaveFunction from raw amplitudes.
// Throws BadLengthError unless the length is a power of two >= 4,
// ZeroNormError when all amplitudes vanish.
inline WaveFunction make_state(const std::vector<Complex>& raw) {
    if (raw.size() < 4 || !detail::is_power_of_two(raw.size())) {
        throw BadLengthError("amplitude vector length must be a power of two >= 4, got " +
                             std::to_string(raw.size()));
    }
    double norm_sq = 0.0;
    for (const Complex& c : raw) norm_sq += std::norm(c);
    if (norm_sq <= 0.0) throw ZeroNormError("amplitude vector has zero norm");

    const double scale = 1.0 / std::sqrt(norm_sq);
    WaveFunction psi;
    psi.amplitudes.reserve(raw.size());
    for (const Complex& c : raw) psi.amplitudes.push_back(c * scale);
    psi.qubits = detail::log2_exact(raw.size());
    psi.renormalization = scale;
    return psi;
}

// Samples f on the grid points x_j = j/2^L and normalizes.
inline WaveFunction sample_function(const std::function<Complex(double)>& f,
                                    const PhysicsConfig& config) {
    const std::size_t n = config.grid_points();
    std::vector<Complex> raw(n);
    for (std::size_t j = 0; j < n; ++j) raw[j] = f(config.grid_point(j));
    return make_state(raw);
}

// |c_j|^2 for one grid point.
inline double probability(const WaveFunction& state, std::size_t j) {
    if (j >= state.size()) {
        throw IndexOutOfRangeError("grid index " + std::to_string(j) + " out of range [0," +
                                   std::to_string(state.size()) + ")");
    }
    return std::norm(state.amplitudes[j]);
}

// Common fixture states.
inline WaveFunction uniform_state(int qubits) {
    return make_state(std::vector<Complex>(std::size_t{1} << qubits, Complex{1.0, 0.0}));
}

inline WaveFunction basis_state(int qubits, std::size_t j) {
    std::vector<Complex> raw(std::size_t{1} << qubits, Complex{0.0, 0.0});
    if (j >= raw.size()) throw IndexOutOfRangeError("basis index out of range");
    raw[j] = Complex{1.0, 0.0};
    return make_state(raw);
}

}  // namespace relgrid
