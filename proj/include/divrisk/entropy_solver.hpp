#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "divrisk/divergence.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/logmgf.hpp"
#include "divrisk/numeric.hpp"
#include "divrisk/options.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {

/// How a relative entropy ball of radius k resolves.
///
/// generic: a negative tilt solves the tangent equation and the worst value
/// is the tilted mean there.  prop1_essinf: the radius covers the cost of
/// moving all mass to the cheapest payoff, so the worst value is the
/// essential infimum and the ball caps there.  prop2_unbounded: no negative
/// exponential moments at all, the infimum is -inf and not attained.
/// prop3_boundary: the domain of the cumulant function ends at a finite
/// negative tilt with finite value and slope, the radius exceeds the tangent
/// range, and the infimum interpolates linearly off the boundary, again not
/// attained.  k_zero: radius zero, the ball is just the baseline.
enum class EntropyCase { Generic, Prop1EssInf, Prop2Unbounded, Prop3Boundary, KZero };

inline const char* case_tag(EntropyCase c) {
    switch (c) {
        case EntropyCase::Generic: return "generic";
        case EntropyCase::Prop1EssInf: return "prop1_essinf";
        case EntropyCase::Prop2Unbounded: return "prop2_unbounded";
        case EntropyCase::Prop3Boundary: return "prop3_boundary";
        case EntropyCase::KZero: return "k_zero";
    }
    return "?";
}

struct EntropySolveReport {
    double k = 0.0;
    double k_max = pos_inf;
    EntropyCase case_tag = EntropyCase::Generic;
    double value = 0.0;       // inf of expected payoff over the ball; -inf allowed
    double model_risk = 0.0;  // -value
    bool attained = false;
    std::optional<double> theta_bar;
    std::optional<DensityVector> worst_density;  // discrete backends only
    double tangent_residual = 0.0;  // |Lambda(theta) - (theta V - k)|
    double mass_residual = 0.0;     // |worst density mass - 1|
    int iterations = 0;
};

/// Radius at which the ball saturates at the essential infimum.
inline double re_kmax(const LogMGFBackend& backend) {
    if (!backend.has_ess_inf()) return pos_inf;
    return -std::log(backend.argmin_mass());
}

/// theta Lambda'(theta) - Lambda(theta): the radius whose tangent tilt is theta.
inline double tangent_radius(const LogMGFBackend& backend, double theta) {
    double l = backend.lambda(theta);
    if (!is_finite(l)) return pos_inf;
    return theta * backend.lambda_prime(theta) - l;
}

inline EntropyCase classify_case(const LogMGFBackend& backend, double k) {
    if (k < 0.0) throw std::invalid_argument("radius k must be >= 0");
    if (k == 0.0) return EntropyCase::KZero;
    if (backend.has_ess_inf() && k >= re_kmax(backend)) return EntropyCase::Prop1EssInf;
    double tmin = backend.theta_min();
    if (tmin == 0.0) return EntropyCase::Prop2Unbounded;
    if (is_finite(tmin) && backend.finite_at_theta_min()) {
        double boundary = tmin * backend.lambda_prime(tmin) - backend.lambda(tmin);
        if (k > boundary) return EntropyCase::Prop3Boundary;
    }
    return EntropyCase::Generic;
}

/// Negative tilt solving the tangent equation for a generic radius.
inline RootResult solve_theta(const LogMGFBackend& backend, double k,
                              const SolverOptions& opts = {}) {
    auto g = [&](double t) { return tangent_radius(backend, t) - k; };
    double tmin = backend.theta_min();
    double lo = 0.0;
    bool found = false;
    if (is_finite(tmin) && backend.finite_at_theta_min()) {
        if (g(tmin) >= 0.0) {
            lo = tmin;
            found = true;
        }
    } else if (is_finite(tmin)) {
        for (int j = 1; j <= 60 && !found; ++j) {
            double t = tmin + std::abs(tmin) * std::pow(2.0, -j);
            if (t < 0.0 && is_finite(backend.lambda(t)) && g(t) >= 0.0) {
                lo = t;
                found = true;
            }
        }
    } else {
        for (double t = -1.0; t >= -1e18 && !found; t *= 2.0) {
            if (g(t) >= 0.0) {
                lo = t;
                found = true;
            }
        }
    }
    if (!found)
        throw std::runtime_error("solve_theta: radius k is outside the tangent range");
    RootOptions ropt;
    ropt.tol = opts.root_tol;
    ropt.f_scale = std::max(1.0, k);
    ropt.max_iter = opts.max_iter;
    return find_root_bracketed(g, lo, 0.0, ropt);
}

namespace detail {

inline DensityVector tilted_density(const ScenarioSet& set, const LogMGFBackend& backend,
                                    double theta) {
    double l = backend.lambda(theta);
    DensityVector d;
    d.values.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        d.values[i] = set.baseline_density(i) * std::exp(theta * set.payoff(i) - l);
    return d;
}

inline DensityVector essinf_density(const ScenarioSet& set, double m, double mass) {
    DensityVector d;
    d.values.resize(set.size(), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.base_prob(i) > 0.0 && payoffs_equal(set.payoff(i), m))
            d.values[i] = set.baseline_density(i) / mass;
    return d;
}

}  // namespace detail

/**
 * @brief Worst expected payoff over the relative entropy ball of radius k.
 *
 * Model risk is the negative of the reported value.  For discrete backends
 * the worst density is reported whenever the infimum is attained.
 */
inline EntropySolveReport solve_vk(const LogMGFBackend& backend, double k,
                                   const SolverOptions& opts = {}) {
    EntropySolveReport rep;
    rep.k = k;
    rep.k_max = re_kmax(backend);
    rep.case_tag = classify_case(backend, k);
    const ScenarioSet* set = backend.scenario_set();

    switch (rep.case_tag) {
        case EntropyCase::KZero: {
            rep.value = backend.b0();
            rep.attained = true;
            rep.theta_bar = 0.0;
            if (set) {
                rep.worst_density = baseline_density(*set);
                rep.mass_residual = std::abs(density_mass(*rep.worst_density, *set) - 1.0);
            }
            break;
        }
        case EntropyCase::Prop1EssInf: {
            rep.value = backend.ess_inf();
            rep.attained = true;
            if (set) {
                rep.worst_density =
                    detail::essinf_density(*set, backend.ess_inf(), backend.argmin_mass());
                rep.mass_residual = std::abs(density_mass(*rep.worst_density, *set) - 1.0);
            }
            break;
        }
        case EntropyCase::Prop2Unbounded: {
            rep.value = neg_inf;
            rep.attained = false;
            break;
        }
        case EntropyCase::Prop3Boundary: {
            double tmin = backend.theta_min();
            rep.value = (k + backend.lambda(tmin)) / tmin;
            rep.attained = false;
            break;
        }
        case EntropyCase::Generic: {
            RootResult root = solve_theta(backend, k, opts);
            if (!root.converged)
                throw std::runtime_error("solve_vk: tangent equation did not converge");
            rep.theta_bar = root.x;
            rep.iterations = root.iterations;
            rep.value = backend.lambda_prime(root.x);
            rep.attained = true;
            rep.tangent_residual =
                std::abs(backend.lambda(root.x) - (root.x * rep.value - k));
            if (set) {
                rep.worst_density = detail::tilted_density(*set, backend, root.x);
                rep.mass_residual = std::abs(density_mass(*rep.worst_density, *set) - 1.0);
            }
            break;
        }
    }
    rep.model_risk = -rep.value;
    return rep;
}

/**
 * @brief Convex conjugate of Lambda: sup over theta of theta x - Lambda(theta).
 *
 * Solved by driving Lambda' to x where a tangent exists; off the tangent
 * range the supremum saturates at the domain boundary (a finite theta_min or
 * an effectively infinite tilt) and the affine boundary value is returned.
 */
inline double lambda_star(const LogMGFBackend& backend, double x, const SolverOptions& opts = {}) {
    if (backend.has_ess_inf()) {
        double m = backend.ess_inf();
        if (x < m && !payoffs_equal(x, m)) return pos_inf;
        if (payoffs_equal(x, m)) return re_kmax(backend);
    }
    auto slope = [&](double t) { return backend.lambda_prime(t) - x; };
    double tmin = backend.theta_min();

    // Lower end of the search bracket: saturate toward theta_min.
    double lo = 0.0;
    bool lo_found = false;
    if (slope(0.0) >= 0.0) {
        if (is_finite(tmin)) {
            if (backend.finite_at_theta_min() && slope(tmin) >= 0.0) {
                // Supremum on the boundary: affine continuation.
                return tmin * x - backend.lambda(tmin);
            }
            for (int j = 1; j <= 60 && !lo_found; ++j) {
                double t = tmin + std::max(std::abs(tmin), 1.0) * std::pow(2.0, -j);
                if (t >= 0.0 || !is_finite(backend.lambda(t))) continue;
                if (slope(t) <= 0.0)
                    lo_found = true;  // tangent exists between t and 0
                if (lo_found) lo = t;
            }
            if (!lo_found) {
                double t = tmin + std::max(std::abs(tmin), 1.0) * std::pow(2.0, -60);
                return t * x - backend.lambda(t);
            }
        } else {
            double t = -1.0;
            for (int j = 0; j <= 60 && !lo_found; ++j, t *= 2.0) {
                if (slope(t) <= 0.0) {
                    lo_found = true;
                    lo = t;
                }
            }
            if (!lo_found) return t * x - backend.lambda(t);  // saturated: x at or below ess inf
        }
        RootOptions ropt;
        ropt.tol = opts.conjugate_tol;
        ropt.f_scale = std::max(1.0, std::abs(x));
        ropt.max_iter = opts.max_iter;
        RootResult r = find_root_bracketed(slope, lo, 0.0, ropt);
        return r.x * x - backend.lambda(r.x);
    }

    // x above the baseline mean: positive tilts.
    double hi = 1.0;
    bool hi_found = false;
    for (int j = 0; j <= 60 && !hi_found; ++j, hi *= 2.0) {
        if (!is_finite(backend.lambda(hi))) break;
        if (slope(hi) >= 0.0) hi_found = true;
    }
    if (!hi_found) return hi * x - backend.lambda(hi);  // saturated or +inf
    RootOptions ropt;
    ropt.tol = opts.conjugate_tol;
    ropt.f_scale = std::max(1.0, std::abs(x));
    ropt.max_iter = opts.max_iter;
    RootResult r = find_root_bracketed(slope, 0.0, hi, ropt);
    return r.x * x - backend.lambda(r.x);
}

struct ConjugateSolveResult {
    double value = 0.0;     // worst expected payoff
    double residual = 0.0;  // |Lambda*(value) - k|
    int iterations = 0;
};

/**
 * @brief Worst expected payoff found from the conjugate side: the x below the
 * baseline mean solving Lambda*(x) = k.  Covers the generic and boundary
 * cases in one sweep; radii at or beyond the cap are rejected.
 */
inline ConjugateSolveResult solve_via_conjugate(const LogMGFBackend& backend, double k,
                                                const SolverOptions& opts = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("solve_via_conjugate: k must be > 0");
    EntropyCase c = classify_case(backend, k);
    if (c == EntropyCase::Prop1EssInf || c == EntropyCase::Prop2Unbounded)
        throw std::invalid_argument("solve_via_conjugate: radius not in the tangent range");

    double b0 = backend.b0();
    auto h = [&](double x) { return lambda_star(backend, x, opts) - k; };

    double lo = 0.0;
    bool found = false;
    if (backend.has_ess_inf()) {
        lo = backend.ess_inf();
        found = h(lo) >= 0.0;  // k < k_max in the cases admitted here
    } else {
        double span = std::max(1.0, std::abs(b0));
        for (int j = 0; j <= 60 && !found; ++j) {
            double x = b0 - span * std::pow(2.0, j);
            if (h(x) >= 0.0) {
                lo = x;
                found = true;
            }
        }
    }
    if (!found)
        throw std::runtime_error("solve_via_conjugate: could not bracket the radius");

    RootOptions ropt;
    ropt.tol = opts.conjugate_tol * 10.0;
    ropt.f_scale = std::max(1.0, k);
    ropt.max_iter = opts.max_iter;
    RootResult r = find_root_bracketed(h, lo, b0, ropt);
    ConjugateSolveResult out;
    out.value = r.x;
    out.residual = std::abs(r.fx);
    out.iterations = r.iterations;
    return out;
}

}  // namespace divrisk
