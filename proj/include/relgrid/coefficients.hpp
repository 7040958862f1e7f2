#pragma once

// Series coefficients for the relativistic kinetic-energy expansion
//   mc^2 (sqrt(1 + p^2/m^2c^2) - 1) = sum_l (-1)^{l+1} alpha_l (p^2/m^2c^2)^l mc^2
// and their regrouped lattice forms (beta for the periodic grid, gamma for
// the hard-wall boundary corrections).

#include <cstdint>
#include <string>
#include <vector>

#include "relgrid/errors.hpp"
#include "relgrid/grid.hpp"

namespace relgrid {

// Exact ratio of two 64-bit integers, always stored reduced with den > 0.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

namespace detail {

using Int128 = unsigned __int128;

inline Int128 gcd128(Int128 a, Int128 b) {
    while (b != 0) {
        Int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace detail

// alpha_l = (2l)! / ((l!)^2 (2l-1) 4^l), evaluated in exact integer
// arithmetic. The central binomial is built by the recurrence
// C(2(k+1), k+1) = C(2k, k) * 2(2k+1)/(k+1), which stays integral.
inline Rational alpha_rational(int l) {
    if (l < 1) throw UnsupportedOrderError("alpha requires l >= 1, got " + std::to_string(l));
    if (l > 15) throw UnsupportedOrderError("alpha overflows exact arithmetic beyond l = 15");

    detail::Int128 binom = 2;  // C(2,1)
    for (int k = 1; k < l; ++k) {
        binom = binom * 2 * detail::Int128(2 * k + 1) / detail::Int128(k + 1);
    }
    detail::Int128 num = binom;
    detail::Int128 den = detail::Int128(2 * l - 1) << (2 * l);  // (2l-1) * 4^l
    detail::Int128 g = detail::gcd128(num, den);
    num /= g;
    den /= g;
    return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

inline double alpha(int l) { return alpha_rational(l).to_double(); }

// beta_l for the periodic-grid regrouping
//   H_K = beta_0 + sum_{l=1..order} beta_l A_sym(l)
// where A_sym(l) is the symmetrised l-step shift. Closed forms exist for
// orders 1 and 2 only; higher orders go through the dense-matrix path.
inline std::vector<double> beta(const PhysicsConfig& config, int order) {
    const double mc2 = config.rest_energy();
    const double r2 = config.compton_ratio() * config.compton_ratio();
    const double r4 = r2 * r2;
    const double a1 = alpha(1);
    const double a2 = alpha(2);
    switch (order) {
        case 1:
            return {2.0 * mc2 * a1 * r2, -mc2 * a1 * r2};
        case 2:
            return {2.0 * mc2 * (a1 * r2 - 3.0 * a2 * r4), mc2 * (-a1 * r2 + 4.0 * a2 * r4),
                    -mc2 * a2 * r4};
        default:
            throw UnsupportedOrderError("beta closed forms exist for orders 1 and 2 only, got " +
                                        std::to_string(order));
    }
}

// gamma_d weights for the hard-wall edge operators {E0, E1, E2, E0^2} at
// expansion order 2. gamma_0 folds the order-1 edge correction together
// with the order-2 4<E0> piece; the fold is exact because 4 alpha_2 = alpha_1.
inline std::vector<double> gamma(const PhysicsConfig& config) {
    const double mc2 = config.rest_energy();
    const double r2 = config.compton_ratio() * config.compton_ratio();
    const double r4 = r2 * r2;
    const double a1 = alpha(1);
    const double a2 = alpha(2);
    return {mc2 * a1 * r2 * (1.0 - r2), mc2 * a2 * r4, mc2 * a2 * r4, -mc2 * a2 * r4};
}

// Precomputed per-run coefficient bundle. order is capped at 2 because the
// beta closed forms stop there; order-3 energies are evaluated from dense
// matrices instead.
struct CoefficientSet {
    int order = 1;
    std::vector<double> alpha_values;  // alpha_1 .. alpha_order
    std::vector<double> beta_values;   // beta_0 .. beta_order
    std::vector<double> gamma_values;  // gamma_0 .. gamma_3, orders >= 2 only
    PhysicsConfig config;
};

inline CoefficientSet make_coefficients(const PhysicsConfig& config, int order) {
    if (order < 1 || order > 2) {
        throw UnsupportedOrderError("coefficient sets support orders 1 and 2, got " +
                                    std::to_string(order));
    }
    CoefficientSet set;
    set.order = order;
    for (int l = 1; l <= order; ++l) set.alpha_values.push_back(alpha(l));
    set.beta_values = beta(config, order);
    if (order >= 2) set.gamma_values = gamma(config);
    set.config = config;
    return set;
}

// Expansion validity threshold on <p^2>/(m c)^2; beyond this the dropped
// next-order term is no longer comfortably small.
inline constexpr double kValidityWarnThreshold = 0.1;

}  // namespace relgrid
