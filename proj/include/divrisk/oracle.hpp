#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "divrisk/divergence.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {
namespace oracle {

/// Result of a brute-force reference computation.  error_bound is the grid
/// resolution translated through the objective's slope; it is an estimate of
/// how far the reported value can sit from the true optimum, not a proof.
struct OracleResult {
    double value = 0.0;
    double error_bound = 0.0;
    DensityVector argmin;
    long evaluations = 0;
};

namespace detail {

/// Nested lattice minimization over probability mass vectors q (the last
/// coordinate absorbs the remainder).  `objective(p, cutoff)` returns +inf to
/// mark a point that is infeasible or provably no better than `cutoff` (the
/// incumbent value); it may move `p` to the feasible representative it scored,
/// and the search then adopts that point.  Deterministic: scans in
/// lexicographic order, keeps the first of equal values, refines around the
/// incumbent.
inline OracleResult lattice_minimize(
    const ScenarioSet& set, const std::function<double(DensityVector&, double)>& objective,
    int levels, int grid_pts) {
    const std::size_t n = set.size();
    if (n < 2 || n > 4)
        throw std::invalid_argument("oracle: supports 2 to 4 scenarios");
    const std::size_t dim = n - 1;

    std::vector<double> center(dim);
    for (std::size_t j = 0; j < dim; ++j) center[j] = set.base_prob(j);

    auto masses_to_density = [&](const std::vector<double>& q, DensityVector& p) -> bool {
        double rest = 1.0;
        for (std::size_t j = 0; j < dim; ++j) rest -= q[j];
        if (rest < -1e-12) return false;
        for (std::size_t j = 0; j < dim; ++j) p.values[j] = q[j] / set.ref_weight(j);
        p.values[dim] = std::max(rest, 0.0) / set.ref_weight(dim);
        return true;
    };

    DensityVector best_p;
    best_p.values.resize(n);
    double best_val = pos_inf;
    bool have_best = false;
    long evals = 0;

    double h = 1.0;  // half-width of the search box around the incumbent
    double step = 0.0;
    for (int level = 0; level < levels; ++level) {
        // Re-center at the same scale until the scan stops improving, so the
        // incumbent can travel along a feasibility boundary farther than one
        // box width before the grid is refined.
        for (int pass = 0; pass < 64; ++pass) {
            double before = best_val;
            std::vector<double> lo(dim), hi(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                lo[j] = std::max(0.0, center[j] - h);
                hi[j] = std::min(1.0, center[j] + h);
            }
            step = 0.0;
            for (std::size_t j = 0; j < dim; ++j)
                step = std::max(step, (hi[j] - lo[j]) / (grid_pts - 1));

            std::vector<int> idx(dim, 0);
            std::vector<double> q(dim);
            DensityVector p;
            p.values.resize(n);
            bool done = false;
            while (!done) {
                for (std::size_t j = 0; j < dim; ++j)
                    q[j] = lo[j] + (hi[j] - lo[j]) * idx[j] / (grid_pts - 1);
                if (masses_to_density(q, p)) {
                    ++evals;
                    double v = objective(p, best_val);
                    if (is_finite(v) && (!have_best || v < best_val)) {
                        best_val = v;
                        best_p = p;
                        have_best = true;
                    }
                }
                // Lexicographic advance.
                std::size_t j = 0;
                for (; j < dim; ++j) {
                    if (++idx[j] < grid_pts) break;
                    idx[j] = 0;
                }
                done = (j == dim);
            }
            // Also probe the incumbent center itself (it need not be on the lattice).
            if (masses_to_density(center, p)) {
                ++evals;
                double v = objective(p, best_val);
                if (is_finite(v) && (!have_best || v < best_val)) {
                    best_val = v;
                    best_p = p;
                    have_best = true;
                }
            }
            if (!have_best)
                throw std::runtime_error("oracle: no feasible lattice point found");
            for (std::size_t j = 0; j < dim; ++j)
                center[j] = best_p.values[j] * set.ref_weight(j);
            if (!(best_val < before)) break;  // stationary at this scale
        }
        h = step;  // next box covers the cell around the incumbent
    }

    OracleResult out;
    out.value = best_val;
    out.argmin = best_p;
    out.evaluations = evals;
    double slope = 0.0;
    for (std::size_t j = 0; j < dim; ++j)
        slope += std::abs(set.payoff(j) - set.payoff(dim));
    out.error_bound = 2.0 * step * std::max(slope, 1.0);
    return out;
}

}  // namespace detail

/**
 * @brief Reference worst expected payoff: minimize the mean over lattice
 * densities whose divergence cost stays within k.
 *
 * A lattice point outside the ball is slid back along the chord toward the
 * baseline until the ball is re-entered, and that boundary point is scored
 * instead.  Every scored candidate is therefore feasible, so the result is a
 * true upper bound on the constrained infimum, and the search landscape stays
 * continuous across the feasibility edge.  `cost` must be the direct
 * divergence formula, independent of the solvers under test.
 */
inline OracleResult simplex_min_constrained(const ScenarioSet& set,
                                            const std::function<double(const DensityVector&)>& cost,
                                            double k, int levels = 6, int grid_pts = 17) {
    if (!(k >= 0.0)) throw std::invalid_argument("oracle: k must be >= 0");
    const DensityVector base = baseline_density(set);
    const double b0 = density_mean(base, set);
    auto objective = [&, base, b0](DensityVector& p, double cutoff) {
        double mean = density_mean(p, set);
        double c = cost(p);
        if (is_finite(c) && c <= k) return mean;
        // The mean is linear along the chord, so the pulled-back value cannot
        // beat min(b0, mean); skip the bisection when that cannot improve.
        if (std::min(b0, mean) >= cutoff) return pos_inf;
        // Divergence is convex and zero at the baseline, hence monotone along
        // the chord: bisect for the boundary crossing.
        double lo = 0.0, hi = 1.0;
        DensityVector m = p;
        for (int it = 0; it < 48; ++it) {
            double t = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < m.values.size(); ++i)
                m.values[i] = base.values[i] + t * (p.values[i] - base.values[i]);
            double cm = cost(m);
            if (is_finite(cm) && cm <= k)
                lo = t;
            else
                hi = t;
        }
        for (std::size_t i = 0; i < p.values.size(); ++i)
            p.values[i] = base.values[i] + lo * (p.values[i] - base.values[i]);
        return density_mean(p, set);
    };
    return detail::lattice_minimize(set, objective, levels, grid_pts);
}

/**
 * @brief Reference penalized value: minimize mean plus lambda times cost over
 * lattice densities.  The error bound additionally reflects the local slope
 * of the cost term, estimated at the incumbent.
 */
inline OracleResult simplex_min_penalized(const ScenarioSet& set,
                                          const std::function<double(const DensityVector&)>& cost,
                                          double lambda, int levels = 6, int grid_pts = 17) {
    if (!(lambda > 0.0)) throw std::invalid_argument("oracle: lambda must be > 0");
    auto objective = [&](DensityVector& p, double) {
        double c = cost(p);
        if (!is_finite(c)) return pos_inf;
        return density_mean(p, set) + lambda * c;
    };
    OracleResult res = detail::lattice_minimize(set, objective, levels, grid_pts);

    // Estimate the cost slope near the optimum to widen the bound.
    const std::size_t dim = set.size() - 1;
    double hstep = res.error_bound / std::max(1.0, 2.0 * dim);
    double slope = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        DensityVector p = res.argmin;
        p.values[j] += hstep / set.ref_weight(j);
        double c1 = objective(p, pos_inf);
        if (is_finite(c1)) slope = std::max(slope, std::abs(c1 - res.value) / hstep);
    }
    res.error_bound += slope * hstep;
    return res;
}

/**
 * @brief Independent check of the entropy-ball solve: sweep the tilt over a
 * widening grid, bracket the radius equation, bisect, and report the tilted
 * mean.  Uses only direct sums over the scenarios.
 */
inline OracleResult theta_sweep_re(const ScenarioSet& set, double k, int sweep_pts = 4096) {
    if (!(k > 0.0)) throw std::invalid_argument("oracle: k must be > 0");
    auto lam = [&](double t) {
        double shift = neg_inf;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (set.base_prob(i) > 0.0) shift = std::max(shift, t * set.payoff(i));
        double s = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (set.base_prob(i) > 0.0)
                s += set.base_prob(i) * std::exp(t * set.payoff(i) - shift);
        return shift + std::log(s);
    };
    auto lamp = [&](double t) {
        double shift = neg_inf;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (set.base_prob(i) > 0.0) shift = std::max(shift, t * set.payoff(i));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (set.base_prob(i) > 0.0) {
                double e = set.base_prob(i) * std::exp(t * set.payoff(i) - shift);
                num += set.payoff(i) * e;
                den += e;
            }
        return num / den;
    };
    auto g = [&](double t) { return t * lamp(t) - lam(t); };

    double T = 1.0;
    long evals = 0;
    for (int j = 0; j < 60 && g(-T) < k; ++j) T *= 2.0;
    ++evals;
    if (g(-T) < k) throw std::runtime_error("oracle: radius beyond the tangent range");

    // Walk the grid to the first bracket, then bisect.
    double prev = 0.0;
    double lo = -T, hi = 0.0;
    for (int i = 1; i <= sweep_pts; ++i) {
        double t = -T * i / sweep_pts;
        ++evals;
        if (g(t) >= k) {
            lo = t;
            hi = prev;
            break;
        }
        prev = t;
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        ++evals;
        if (g(mid) >= k)
            lo = mid;
        else
            hi = mid;
    }
    OracleResult out;
    double tbar = 0.5 * (lo + hi);
    out.value = lamp(tbar);
    out.evaluations = evals;
    out.error_bound = std::abs(lamp(lo) - lamp(hi)) + 1e-12;
    DensityVector d;
    d.values.resize(set.size());
    double l = lam(tbar);
    for (std::size_t i = 0; i < set.size(); ++i)
        d.values[i] = set.baseline_density(i) * std::exp(tbar * set.payoff(i) - l);
    out.argmin = std::move(d);
    return out;
}

}  // namespace oracle
}  // namespace divrisk
