#pragma once

// Derivative-free minimisers used by the variational loop: Nelder-Mead for
// exact-expectation objectives and SPSA for noisy (finite-shot) objectives.
// Coefficients are fixed constants so runs are reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "relgrid/errors.hpp"
#include "relgrid/rng.hpp"

namespace relgrid {

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimResult {
    std::vector<double> best_params;
    double best_value = 0.0;
    long long evaluations = 0;
    long long iterations = 0;
    bool converged = false;
    std::vector<double> history;  // objective per iteration
};

struct NelderMeadOptions {
    long long max_evals = 20000;
    double tol = 1e-9;          // simplex diameter threshold
    double initial_step = 0.25;  // simplex edge length around the start point
};

// Standard Nelder-Mead simplex with reflection 1, expansion 2, contraction
// 0.5, shrink 0.5. history records the best vertex per iteration, which is
// non-increasing by construction.
inline OptimResult nelder_mead(const Objective& f, const std::vector<double>& start,
                               const NelderMeadOptions& options = {}) {
    const std::size_t n = start.size();
    if (n == 0) throw ConfigError("nelder_mead requires at least one parameter");

    OptimResult result;
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;

    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = f(simplex[i]);
        ++result.evaluations;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> new_simplex(n + 1);
        std::vector<double> new_values(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            new_simplex[i] = simplex[idx[i]];
            new_values[i] = values[idx[i]];
        }
        simplex = std::move(new_simplex);
        values = std::move(new_values);
    };

    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d = std::max(d, std::abs(simplex[i][j] - simplex[0][j]));
            }
        }
        return d;
    };

    order();
    while (result.evaluations < options.max_evals) {
        ++result.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= double(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
            }
            return p;
        };

        std::vector<double> reflected = blend(-1.0);
        const double fr = f(reflected);
        ++result.evaluations;

        if (fr < values[0]) {
            std::vector<double> expanded = blend(-2.0);
            const double fe = f(expanded);
            ++result.evaluations;
            if (fe < fr) {
                simplex[n] = std::move(expanded);
                values[n] = fe;
            } else {
                simplex[n] = std::move(reflected);
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = std::move(reflected);
            values[n] = fr;
        } else {
            const bool outside = fr < values[n];
            std::vector<double> contracted = blend(outside ? -0.5 : 0.5);
            const double fc = f(contracted);
            ++result.evaluations;
            if (fc < std::min(fr, values[n])) {
                simplex[n] = std::move(contracted);
                values[n] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = f(simplex[i]);
                    ++result.evaluations;
                }
            }
        }

        order();
        result.history.push_back(values[0]);
        if (diameter() < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.best_params = simplex[0];
    result.best_value = values[0];
    return result;
}

struct SpsaOptions {
    long long max_evals = 20000;
    double tol = 1e-9;  // parameter step threshold
    double a = 0.1;
    double big_a = 10.0;
    double c = 0.1;
    double alpha = 0.602;
    double gamma = 0.101;
    std::uint64_t seed = 0;
};

// Simultaneous-perturbation stochastic approximation with the standard gain
// schedules a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma. history records the
// symmetric average of the two probe evaluations per iteration.
inline OptimResult spsa(const Objective& f, const std::vector<double>& start,
                        const SpsaOptions& options = {}) {
    const std::size_t n = start.size();
    if (n == 0) throw ConfigError("spsa requires at least one parameter");

    OptimResult result;
    std::vector<double> x = start;
    auto gen = make_engine(options.seed, 0x5B5AULL);
    std::bernoulli_distribution coin(0.5);

    long long k = 0;
    while (result.evaluations + 2 <= options.max_evals) {
        const double ck = options.c / std::pow(double(k + 1), options.gamma);
        const double ak =
            options.a / std::pow(double(k + 1) + options.big_a, options.alpha);

        std::vector<double> delta(n), plus(n), minus(n);
        for (std::size_t j = 0; j < n; ++j) {
            delta[j] = coin(gen) ? 1.0 : -1.0;
            plus[j] = x[j] + ck * delta[j];
            minus[j] = x[j] - ck * delta[j];
        }
        const double fp = f(plus);
        const double fm = f(minus);
        result.evaluations += 2;
        ++result.iterations;
        ++k;

        double step_norm = 0.0;
        const double diff = (fp - fm) / (2.0 * ck);
        for (std::size_t j = 0; j < n; ++j) {
            const double step = ak * diff / delta[j];
            x[j] -= step;
            step_norm = std::max(step_norm, std::abs(step));
        }
        result.history.push_back(0.5 * (fp + fm));
        if (step_norm < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.best_params = x;
    result.best_value = f(x);
    ++result.evaluations;
    return result;
}

}  // namespace relgrid
