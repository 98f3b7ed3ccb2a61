#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "divrisk/divergence.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/general_solver.hpp"
#include "divrisk/logmgf.hpp"
#include "divrisk/options.hpp"

namespace divrisk {

/**
 * @brief Penalized worst-case functional W(lambda), the infimum of expected
 * payoff plus lambda times divergence cost over normalized densities.
 *
 * boundary marks suprema hit on the edge of the dual domain, where the
 * reported density carries mass below 1 and the infimum is approached but
 * not attained.
 */
struct PreferenceReport {
    double lambda = 0.0;
    double w_value = 0.0;  // -inf and +inf markers allowed
    double theta1_star = 0.0;
    bool boundary = false;
    std::optional<DensityVector> minimizing_density;
    double mass_residual = 0.0;
    int iterations = 0;
};

/**
 * @brief W(lambda) for a general divergence ball, via the scalar dual
 * sup over theta1 of theta1 - K(theta1, -1/lambda), scaled by lambda.
 */
inline PreferenceReport evaluate_w(const GeneralProblem& pr, double lambda,
                                   const SolverOptions& opts = {}) {
    if (!(lambda > 0.0)) throw std::invalid_argument("evaluate_w: lambda must be > 0");
    PreferenceReport rep;
    rep.lambda = lambda;
    double t2 = -1.0 / lambda;

    detail::InnerSolve in = detail::solve_theta1(pr, t2, opts);
    if (in.boundary) {
        rep.boundary = true;
        if (is_pos_inf(in.theta1)) {
            // The dual objective increases without bound.
            rep.w_value = pos_inf;
            rep.theta1_star = pos_inf;
            return rep;
        }
        double margin = 1e-9 * std::max(1.0, std::abs(in.theta1));
        rep.theta1_star = in.theta1 - margin;
    } else if (in.converged) {
        rep.theta1_star = in.theta1;
        rep.mass_residual = in.mass_residual;
        rep.iterations = in.iterations;
    } else {
        throw std::runtime_error("evaluate_w: inner mass equation failed");
    }

    Theta th{rep.theta1_star, t2};
    double kv = k_eval(pr, th);
    if (!is_finite(kv)) {
        rep.w_value = neg_inf;
        return rep;
    }
    rep.w_value = lambda * (rep.theta1_star - kv);
    rep.minimizing_density = p_theta(pr, th);
    return rep;
}

/**
 * @brief W(lambda) for the relative entropy cost in closed form,
 * -lambda Lambda(-1/lambda); -inf when that tilt has no exponential moment.
 */
inline PreferenceReport multiplier_w(const LogMGFBackend& backend, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("multiplier_w: lambda must be > 0");
    PreferenceReport rep;
    rep.lambda = lambda;
    double t = -1.0 / lambda;
    double l = backend.lambda(t);
    if (!is_finite(l)) {
        rep.w_value = neg_inf;
        return rep;
    }
    rep.w_value = -lambda * l;
    rep.theta1_star = -l;
    if (const ScenarioSet* set = backend.scenario_set()) {
        DensityVector d;
        d.values.resize(set->size());
        for (std::size_t i = 0; i < set->size(); ++i)
            d.values[i] = set->baseline_density(i) * std::exp(t * set->payoff(i) - l);
        rep.mass_residual = std::abs(density_mass(d, *set) - 1.0);
        rep.minimizing_density = std::move(d);
    }
    return rep;
}

}  // namespace divrisk
