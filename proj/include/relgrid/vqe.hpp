#pragma once

// Variational minimisation of the total energy over parameterised real
// ansatz states, with multi-start derivative-free optimisation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "relgrid/errors.hpp"
#include "relgrid/estimators.hpp"
#include "relgrid/grid.hpp"
#include "relgrid/optimize.hpp"
#include "relgrid/rng.hpp"

namespace relgrid {

enum class AnsatzKind { GridDirect, LayeredRotation, Gaussian };

inline const char* to_string(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::GridDirect: return "grid_direct";
        case AnsatzKind::LayeredRotation: return "layered_rotation";
        case AnsatzKind::Gaussian: return "gaussian";
    }
    return "?";
}

enum class InitStrategy { RandomUniform, Zero, Provided };

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::GridDirect;
    int qubits = 2;
    int layers = 1;  // layered_rotation only
    InitStrategy init = InitStrategy::RandomUniform;
    std::vector<double> initial_params;  // Provided strategy

    int parameter_count() const {
        switch (kind) {
            case AnsatzKind::GridDirect: return (1 << qubits) - 1;
            case AnsatzKind::LayeredRotation: return qubits * layers;
            case AnsatzKind::Gaussian: return 2;
        }
        return 0;
    }
};

namespace detail {

inline void check_param_count(const AnsatzSpec& spec, const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != spec.parameter_count()) {
        throw ParamLengthError("ansatz expects " + std::to_string(spec.parameter_count()) +
                               " parameters, got " + std::to_string(params.size()));
    }
}

// Hyperspherical coordinates over the real unit sphere in R^N:
//   c_0 = cos t_0,
//   c_j = sin t_0 ... sin t_{j-1} cos t_j,
//   c_{N-1} = sin t_0 ... sin t_{N-2}.
inline std::vector<Complex> hyperspherical_amplitudes(const std::vector<double>& angles) {
    const std::size_t n = angles.size() + 1;
    std::vector<Complex> raw(n);
    double sin_prod = 1.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        raw[j] = Complex{sin_prod * std::cos(angles[j]), 0.0};
        sin_prod *= std::sin(angles[j]);
    }
    raw[n - 1] = Complex{sin_prod, 0.0};
    return raw;
}

// In-place Y-rotation on one qubit of a real statevector
// (qubit q is bit q of the grid index).
inline void apply_ry(std::vector<double>& amp, int qubit, double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if (i & bit) continue;
        const double a0 = amp[i], a1 = amp[i | bit];
        amp[i] = c * a0 - s * a1;
        amp[i | bit] = s * a0 + c * a1;
    }
}

inline void apply_cnot(std::vector<double>& amp, int control, int target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amp[i], amp[i | tbit]);
    }
}

}  // namespace detail

// Builds the trial state for one parameter vector. All three kinds produce
// real amplitudes, so every ansatz is valid for the hard-wall estimators.
inline WaveFunction build_ansatz(const AnsatzSpec& spec, const std::vector<double>& params,
                                 const PhysicsConfig& config) {
    detail::check_param_count(spec, params);
    const std::size_t n = std::size_t{1} << spec.qubits;

    switch (spec.kind) {
        case AnsatzKind::GridDirect:
            return make_state(detail::hyperspherical_amplitudes(params));

        case AnsatzKind::LayeredRotation: {
            std::vector<double> amp(n, 0.0);
            amp[0] = 1.0;
            for (int layer = 0; layer < spec.layers; ++layer) {
                for (int q = 0; q < spec.qubits; ++q) {
                    detail::apply_ry(amp, q, params[std::size_t(layer * spec.qubits + q)]);
                }
                for (int q = 0; q + 1 < spec.qubits; ++q) detail::apply_cnot(amp, q, q + 1);
            }
            std::vector<Complex> raw(n);
            for (std::size_t j = 0; j < n; ++j) raw[j] = Complex{amp[j], 0.0};
            return make_state(raw);
        }

        case AnsatzKind::Gaussian: {
            const double mu = params[0], sigma = params[1];
            if (sigma <= 0.0) {
                throw NonpositiveWidthError("gaussian width must be positive, got " +
                                            std::to_string(sigma));
            }
            std::vector<Complex> raw(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double x = config.grid_point(j);
                raw[j] = Complex{std::exp(-(x - mu) * (x - mu) / (4.0 * sigma * sigma)), 0.0};
            }
            return make_state(raw);
        }
    }
    throw ConfigError("unknown ansatz kind");
}

// Inverse of the grid_direct parameterisation: angles reproducing a given
// real state exactly (the parameterisation covers the whole real sphere).
inline std::vector<double> grid_direct_params_for(const WaveFunction& state) {
    if (!state.is_real()) {
        throw ComplexAmplitudesError("grid_direct covers real amplitude vectors only");
    }
    const std::size_t n = state.size();
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = state.amplitudes[j].real();

    std::vector<double> tail(n, 0.0);  // tail[j] = sqrt(sum_{i>j} c_i^2)
    double acc = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        tail[j] = std::sqrt(acc);
        acc += c[j] * c[j];
    }
    std::vector<double> angles(n - 1);
    for (std::size_t j = 0; j + 2 < n; ++j) angles[j] = std::atan2(tail[j], c[j]);
    angles[n - 2] = std::atan2(c[n - 1], c[n - 2]);
    return angles;
}

// What the variational loop minimises.
struct ObjectiveSpec {
    PhysicsConfig physics;
    BoundaryCondition bc = BoundaryCondition::PBC;
    int order = 1;
    PotentialSpec pot;
    ShotPlan plan;
    DbcVariant variant = DbcVariant::Full;
};

enum class OptimizerKind { NelderMead, Spsa };

struct VqeOptions {
    OptimizerKind optimizer = OptimizerKind::NelderMead;
    long long max_evals = 60000;  // per restart
    double tol = 1e-9;
    int restarts = 8;
    int workers = 0;  // 0: one thread per restart up to hardware limit
    std::uint64_t seed = 0;
};

struct VqeResult {
    double best_energy = 0.0;
    std::vector<double> best_params;
    EnergyBreakdown breakdown;
    long long iterations = 0;   // summed over restarts
    long long evaluations = 0;  // summed over restarts
    bool converged = false;     // winning restart converged
    std::vector<double> history;  // winning restart, best value per iteration
    std::vector<double> restart_energies;
    std::vector<std::vector<double>> restart_histories;
    int best_restart = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> initial_params(const AnsatzSpec& spec, int restart,
                                          std::uint64_t restart_seed) {
    const std::size_t count = std::size_t(spec.parameter_count());
    if (spec.init == InitStrategy::Provided && restart == 0) {
        if (spec.initial_params.size() != count) {
            throw ParamLengthError("provided initial parameter vector has wrong length");
        }
        return spec.initial_params;
    }
    if (spec.init == InitStrategy::Zero && restart == 0) {
        if (spec.kind == AnsatzKind::Gaussian) return {0.5, 0.15};
        return std::vector<double>(count, 0.0);
    }
    auto gen = make_engine(restart_seed, 0x1417ULL);
    std::vector<double> params(count);
    if (spec.kind == AnsatzKind::Gaussian) {
        std::uniform_real_distribution<double> mu(0.25, 0.75), sigma(0.05, 0.3);
        params[0] = mu(gen);
        params[1] = sigma(gen);
        return params;
    }
    std::uniform_real_distribution<double> angle(
        0.0, spec.kind == AnsatzKind::GridDirect ? std::numbers::pi
                                                 : 2.0 * std::numbers::pi);
    for (auto& p : params) p = angle(gen);
    return params;
}

struct RestartOutcome {
    OptimResult optim;
    bool valid = false;
};

// One restart: Nelder-Mead with a polish loop that restarts the simplex at
// the incumbent with shrinking edge length until improvement stalls, or a
// single SPSA descent in shots mode.
inline OptimResult run_restart(const Objective& objective, const AnsatzSpec& spec, int restart,
                               const VqeOptions& options) {
    const std::uint64_t restart_seed =
        derive_stream_seed(options.seed, 0xE57AULL + std::uint64_t(restart));
    std::vector<double> start = initial_params(spec, restart, restart_seed);

    if (options.optimizer == OptimizerKind::Spsa) {
        SpsaOptions sopt;
        sopt.max_evals = options.max_evals;
        sopt.tol = options.tol;
        sopt.seed = restart_seed;
        return spsa(objective, start, sopt);
    }

    OptimResult total;
    total.best_params = start;
    total.best_value = objective(start);
    total.evaluations = 1;

    double step = 0.25;
    for (int round = 0; round < 40 && total.evaluations < options.max_evals; ++round) {
        NelderMeadOptions nopt;
        nopt.max_evals = options.max_evals - total.evaluations;
        nopt.tol = options.tol;
        nopt.initial_step = step;
        OptimResult r = nelder_mead(objective, total.best_params, nopt);
        total.evaluations += r.evaluations;
        total.iterations += r.iterations;
        total.history.insert(total.history.end(), r.history.begin(), r.history.end());
        total.converged = r.converged;

        const double improvement = total.best_value - r.best_value;
        if (r.best_value < total.best_value) {
            total.best_value = r.best_value;
            total.best_params = r.best_params;
        }
        if (improvement < 1e-13 * (1.0 + std::abs(total.best_value)) && round > 0) break;
        step = std::max(step * 0.2, 1e-5);
    }
    return total;
}

}  // namespace detail

// Multi-start minimisation of the configured energy. Restarts run in
// parallel and are merged deterministically (best value, lowest restart
// index on ties). In shots mode every objective evaluation draws fresh
// shot noise from a seed derived from (master seed, restart, evaluation).
inline VqeResult minimize(const AnsatzSpec& spec, const ObjectiveSpec& objective,
                          const VqeOptions& options = {}) {
    if (options.restarts < 1) throw ConfigError("vqe needs at least one restart");
    if (options.max_evals < 1) throw ConfigError("vqe needs a positive evaluation budget");
    objective.plan.validate();
    objective.pot.validate(objective.physics.grid_points());
    if (spec.qubits != objective.physics.qubits) {
        throw ConfigError("ansatz qubit count does not match the physics grid");
    }
    if (spec.init == InitStrategy::Provided &&
        static_cast<int>(spec.initial_params.size()) != spec.parameter_count()) {
        throw ParamLengthError("provided initial parameter vector has wrong length");
    }

    auto make_objective = [&](int restart) -> Objective {
        auto counter = std::make_shared<long long>(0);
        return [&, restart, counter](const std::vector<double>& params) {
            WaveFunction psi;
            try {
                psi = build_ansatz(spec, params, objective.physics);
            } catch (const NonpositiveWidthError&) {
                return 1e100;  // steer the optimiser back into the valid region
            }
            ShotPlan plan = objective.plan;
            if (plan.mode == ShotMode::Shots) {
                const std::uint64_t restart_seed =
                    derive_stream_seed(objective.plan.rng_seed,
                                       0xE57AULL + std::uint64_t(restart));
                plan.rng_seed =
                    derive_stream_seed(restart_seed, std::uint64_t(++*counter));
            }
            const Estimate kin = kinetic_energy(psi, objective.physics, objective.bc,
                                                objective.order, plan, objective.variant);
            const Estimate pot = potential_energy(psi, objective.pot, plan);
            return kin.value + pot.value;
        };
    };

    std::vector<detail::RestartOutcome> outcomes(std::size_t(options.restarts));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= options.restarts) return;
            outcomes[std::size_t(r)].optim =
                detail::run_restart(make_objective(r), spec, r, options);
            outcomes[std::size_t(r)].valid = true;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int thread_count =
        std::min<int>(options.workers > 0 ? options.workers : int(hw), options.restarts);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(std::size_t(thread_count));
        for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    VqeResult result;
    result.seed = options.seed;
    int best = 0;
    for (int r = 0; r < options.restarts; ++r) {
        const OptimResult& o = outcomes[std::size_t(r)].optim;
        result.evaluations += o.evaluations;
        result.iterations += o.iterations;
        result.restart_energies.push_back(o.best_value);
        result.restart_histories.push_back(o.history);
        if (o.best_value < outcomes[std::size_t(best)].optim.best_value) best = r;
    }
    const OptimResult& winner = outcomes[std::size_t(best)].optim;
    result.best_restart = best;
    result.best_energy = winner.best_value;
    result.best_params = winner.best_params;
    result.converged = winner.converged;
    result.history = winner.history;

    WaveFunction best_state = build_ansatz(spec, result.best_params, objective.physics);
    result.breakdown =
        total_energy(best_state, objective.physics, objective.bc, objective.order,
                     objective.pot, objective.plan, objective.variant);
    return result;
}

}  // namespace relgrid
