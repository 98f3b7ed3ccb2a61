#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "divrisk/extended_real.hpp"
#include "divrisk/kernel.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {

/**
 * @brief Density of a distribution with respect to the scenario set's
 * reference measure: mass of scenario i is values[i] * ref_weight[i].
 */
struct DensityVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

inline void validate_density(const DensityVector& p, const ScenarioSet& set) {
    if (p.size() != set.size())
        throw std::invalid_argument("density: size " + std::to_string(p.size()) +
                                    " does not match scenario count " + std::to_string(set.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] >= 0.0) || !std::isfinite(p[i]))
            throw std::invalid_argument("density: entry for scenario '" + set[i].id +
                                        "' must be finite and >= 0");
}

/// Total mass of the density under the reference measure.
inline double density_mass(const DensityVector& p, const ScenarioSet& set) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m += p[i] * set.ref_weight(i);
    return m;
}

inline bool is_normalized(const DensityVector& p, const ScenarioSet& set, double tol = 1e-9) {
    return std::abs(density_mass(p, set) - 1.0) <= tol;
}

/// Expected payoff under the density.
inline double density_mean(const DensityVector& p, const ScenarioSet& set) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m += set.payoff(i) * p[i] * set.ref_weight(i);
    return m;
}

/// Density of the baseline distribution itself.
inline DensityVector baseline_density(const ScenarioSet& set) {
    DensityVector p;
    p.values.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) p.values[i] = set.baseline_density(i);
    return p;
}

/**
 * @brief Relative entropy of p from q, sum of w_i (p_i log(p_i/q_i) - p_i + q_i).
 *
 * The linear correction vanishes for normalized pairs and keeps the value
 * nonnegative for subprobability densities.  Conventions: a zero p_i
 * contributes q_i w_i, and p_i > 0 against q_i = 0 gives +inf.
 */
inline double relative_entropy(const DensityVector& p, const DensityVector& q,
                               const ScenarioSet& set) {
    validate_density(p, set);
    validate_density(q, set);
    double acc = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        double w = set.ref_weight(i);
        if (p[i] == 0.0) {
            acc += w * q[i];
            continue;
        }
        if (q[i] == 0.0) return pos_inf;
        acc += w * (p[i] * std::log(p[i] / q[i]) - p[i] + q[i]);
    }
    return acc;
}

/**
 * @brief f-divergence of p from q: sum of w_i q_i f(p_i/q_i), plus
 * f'(inf) times the mass p puts where q vanishes.
 */
inline double f_divergence(const DensityVector& p, const DensityVector& q, const ScenarioSet& set,
                           const ConvexKernel& kernel) {
    validate_density(p, set);
    validate_density(q, set);
    double acc = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        double w = set.ref_weight(i);
        if (q[i] == 0.0) {
            double sing = sat_mul(p[i] * w, kernel.f_prime_inf);
            acc = sat_add(acc, sing);
            continue;
        }
        double term = p[i] == 0.0 ? kernel.f_zero : kernel.f(p[i] / q[i]);
        acc = sat_add(acc, sat_mul(w * q[i], term));
    }
    return acc;
}

/// Bregman distance between the densities, sum of w_i Delta_f(p_i, q_i).
inline double bregman_distance(const DensityVector& p, const DensityVector& q,
                               const ScenarioSet& set, const ConvexKernel& kernel) {
    validate_density(p, set);
    validate_density(q, set);
    double acc = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
        acc = sat_add(acc, sat_mul(set.ref_weight(i), bregman_delta(kernel, p[i], q[i])));
    return acc;
}

}  // namespace divrisk
