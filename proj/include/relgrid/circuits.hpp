#pragma once

// Measurement-circuit simulation: the Hadamard test for shift-operator
// expectations and the reference-state overlap protocol for the hard-wall
// edge operators. Both run in exact-expectation mode or with simulated
// finite-shot statistics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "relgrid/errors.hpp"
#include "relgrid/grid.hpp"
#include "relgrid/operators.hpp"
#include "relgrid/rng.hpp"

namespace relgrid {

enum class ShotMode { Exact, Shots };

// How an observable is measured. In shots mode every observable draws its
// full shot_count from its own RNG stream derived from rng_seed, so a plan
// pins the entire stochastic run.
struct ShotPlan {
    ShotMode mode = ShotMode::Exact;
    long long shot_count = 0;
    std::uint64_t rng_seed = 0;

    static ShotPlan exact() { return ShotPlan{}; }

    static ShotPlan shots(long long count, std::uint64_t seed) {
        ShotPlan plan{ShotMode::Shots, count, seed};
        plan.validate();
        return plan;
    }

    void validate() const {
        if (mode == ShotMode::Shots && shot_count < 1) {
            throw ConfigError("shots mode requires shot_count >= 1");
        }
    }
};

// Measured value with its statistical uncertainty and the plan that
// produced it (std_error is 0 in exact mode).
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    ShotPlan plan;
};

// Fixed RNG stream ids, one per observable, so independent measurements
// decorrelate and identical (seed, observable) pairs replay identically.
namespace stream {
inline constexpr std::uint64_t kHadamardRe = 0x100;    // + shift power
inline constexpr std::uint64_t kHadamardIm = 0x200;    // + shift power
inline constexpr std::uint64_t kOverlap = 0x300;       // + 3*row + label index
inline constexpr std::uint64_t kPotential = 0x400;
}  // namespace stream

namespace detail {

// Bernoulli sampling of an event with true probability p: returns the
// frequency estimate and its binomial standard error.
inline Estimate sample_probability(double p, const ShotPlan& plan, std::uint64_t stream_id) {
    const double clamped = std::clamp(p, 0.0, 1.0);
    auto gen = make_engine(plan.rng_seed, stream_id);
    std::binomial_distribution<long long> dist(plan.shot_count, clamped);
    const double hits = static_cast<double>(dist(gen));
    const double n = static_cast<double>(plan.shot_count);
    const double phat = hits / n;
    return Estimate{phat, std::sqrt(phat * (1.0 - phat) / n), plan};
}

}  // namespace detail

// Control-qubit Z measurement of the controlled l-step backward shift:
// P(+1) = (1 + Re<(A^dag)^l>)/2. Returns the estimate of Re<(A^dag)^l>,
// which is <A_sym(l)>/2.
inline Estimate hadamard_test(const WaveFunction& state, long long l, const ShotPlan& plan) {
    plan.validate();
    const double re = expectation_A(state, l).real();
    if (plan.mode == ShotMode::Exact) return Estimate{re, 0.0, plan};
    Estimate p = detail::sample_probability((1.0 + re) / 2.0,
                                            plan, stream::kHadamardRe + std::uint64_t(l));
    // Mean of +/-1 outcomes: 2 phat - 1, with twice the frequency error.
    return Estimate{2.0 * p.value - 1.0, 2.0 * p.std_error, plan};
}

// Same circuit with a phase-shifted control, measuring Im<(A^dag)^l>.
// Extension hook; the main estimators use only the real part.
inline Estimate hadamard_test_imag(const WaveFunction& state, long long l,
                                   const ShotPlan& plan) {
    plan.validate();
    const double im = expectation_A(state, l).imag();
    if (plan.mode == ShotMode::Exact) return Estimate{im, 0.0, plan};
    Estimate p = detail::sample_probability((1.0 + im) / 2.0,
                                            plan, stream::kHadamardIm + std::uint64_t(l));
    return Estimate{2.0 * p.value - 1.0, 2.0 * p.std_error, plan};
}

// Which edge expectation a measurement row targets.
enum class EdgeTarget { E0, E1, E2, E0Sq };

inline const char* to_string(EdgeTarget t) {
    switch (t) {
        case EdgeTarget::E0: return "E0";
        case EdgeTarget::E1: return "E1";
        case EdgeTarget::E2: return "E2";
        case EdgeTarget::E0Sq: return "E0sq";
    }
    return "?";
}

enum class RefLabel { F, G, S };

// One reference state of the overlap protocol: |f> and |g> are basis
// states, |s> their equal superposition.
struct ReferenceState {
    RefLabel label = RefLabel::F;
    EdgeTarget target = EdgeTarget::E0;
    WaveFunction state;
};

namespace detail {

// E0 and E0sq share the measurement row {|0>, |N-1>}; E1 and E2 have their
// own rows. Sharing the row id means shared RNG streams, so a correction
// read off the E0sq probabilities reuses the very same draws.
inline int reference_row(EdgeTarget target) {
    switch (target) {
        case EdgeTarget::E1: return 1;
        case EdgeTarget::E2: return 2;
        default: return 0;
    }
}

inline std::uint64_t overlap_stream(EdgeTarget target, RefLabel label) {
    return stream::kOverlap + std::uint64_t(3 * reference_row(target)) +
           std::uint64_t(static_cast<int>(label));
}

inline ReferenceState make_basis_ref(RefLabel label, EdgeTarget target, int qubits,
                                     std::size_t site) {
    return ReferenceState{label, target, basis_state(qubits, site)};
}

inline ReferenceState make_pair_ref(EdgeTarget target, int qubits, std::size_t site_a,
                                    std::size_t site_b) {
    std::vector<Complex> raw(std::size_t{1} << qubits, Complex{0.0, 0.0});
    raw[site_a] = Complex{1.0, 0.0};
    raw[site_b] = Complex{1.0, 0.0};
    return ReferenceState{RefLabel::S, target, make_state(raw)};
}

}  // namespace detail

// Measurement rows: E0/E0sq -> {|0>, |N-1>}, E1 -> {|1>, |N-1>},
// E2 -> {|0>, |N-2>}; each row also carries the superposition |s> except
// E0sq, which needs only the two basis-state probabilities.
inline std::vector<ReferenceState> reference_states_for(EdgeTarget target, int qubits) {
    const std::size_t n = std::size_t{1} << qubits;
    std::size_t f = 0, g = n - 1;
    switch (target) {
        case EdgeTarget::E0:
        case EdgeTarget::E0Sq: break;
        case EdgeTarget::E1: f = 1; break;
        case EdgeTarget::E2: g = n - 2; break;
    }
    std::vector<ReferenceState> refs;
    refs.push_back(detail::make_basis_ref(RefLabel::F, target, qubits, f));
    refs.push_back(detail::make_basis_ref(RefLabel::G, target, qubits, g));
    if (target != EdgeTarget::E0Sq) refs.push_back(detail::make_pair_ref(target, qubits, f, g));
    return refs;
}

inline std::vector<ReferenceState> reference_states_for(EdgeTarget target,
                                                        const PhysicsConfig& config) {
    return reference_states_for(target, config.qubits);
}

// Born probability |<ref|psi>|^2, exact or Bernoulli-sampled.
inline Estimate overlap_probability(const WaveFunction& state, const ReferenceState& ref,
                                    const ShotPlan& plan) {
    plan.validate();
    if (ref.state.size() != state.size()) {
        throw LengthMismatchError("reference and system state sizes differ");
    }
    Complex overlap{0.0, 0.0};
    for (std::size_t j = 0; j < state.size(); ++j) {
        overlap += std::conj(ref.state.amplitudes[j]) * state.amplitudes[j];
    }
    const double p = std::norm(overlap);
    if (plan.mode == ShotMode::Exact) return Estimate{p, 0.0, plan};
    return detail::sample_probability(p, plan, detail::overlap_stream(ref.target, ref.label));
}

// Edge expectation from overlap probabilities:
//   <E0>, <E1>, <E2> = 2 p_s - p_f - p_g on their rows,
//   <E0^2> = p_f + p_g.
// The Full variant adds the diagonal corrections 2 P_0 (E1) and 2 P_{N-1}
// (E2), measured on the shared E0/E0sq row. Standard errors combine in
// quadrature.
inline Estimate estimate_E(const WaveFunction& state, EdgeTarget which, const ShotPlan& plan,
                           DbcVariant variant = DbcVariant::Full) {
    plan.validate();
    std::vector<ReferenceState> refs = reference_states_for(which, state.qubits);
    const Estimate pf = overlap_probability(state, refs[0], plan);
    const Estimate pg = overlap_probability(state, refs[1], plan);

    double value = 0.0, variance = 0.0;
    if (which == EdgeTarget::E0Sq) {
        value = pf.value + pg.value;
        variance = pf.std_error * pf.std_error + pg.std_error * pg.std_error;
    } else {
        const Estimate ps = overlap_probability(state, refs[2], plan);
        value = 2.0 * ps.value - pf.value - pg.value;
        variance = 4.0 * ps.std_error * ps.std_error + pf.std_error * pf.std_error +
                   pg.std_error * pg.std_error;
    }

    if (variant == DbcVariant::Full &&
        (which == EdgeTarget::E1 || which == EdgeTarget::E2)) {
        std::vector<ReferenceState> shared = reference_states_for(EdgeTarget::E0Sq, state.qubits);
        const ReferenceState& corner = which == EdgeTarget::E1 ? shared[0] : shared[1];
        const Estimate pc = overlap_probability(state, corner, plan);
        value += 2.0 * pc.value;
        variance += 4.0 * pc.std_error * pc.std_error;
    }
    return Estimate{value, std::sqrt(variance), plan};
}

}  // namespace relgrid
