#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>

#include "divrisk/extended_real.hpp"

namespace divrisk {

/// log(sum_i w_i * exp(a_i)) for nonnegative weights, computed with the usual
/// max shift so that large negative exponents cannot underflow the sum to 0.
inline double log_sum_exp(std::span<const double> a, std::span<const double> w) {
    double amax = neg_inf;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (w[i] > 0.0 && a[i] > amax) amax = a[i];
    if (is_neg_inf(amax)) return neg_inf;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (w[i] > 0.0) s += w[i] * std::exp(a[i] - amax);
    return amax + std::log(s);
}

struct RootOptions {
    double tol = 1e-12;      // absolute tolerance on |f(x)|, scaled by f_scale
    double f_scale = 1.0;    // natural magnitude of f near the root
    int max_iter = 200;
};

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Root of a continuous function on a bracketing interval [lo, hi] with
/// f(lo) and f(hi) of opposite sign.  Secant steps are taken while they fall
/// inside the current bracket and shrink it; otherwise the step falls back to
/// bisection, so convergence is guaranteed.
inline RootResult find_root_bracketed(const std::function<double(double)>& f,
                                      double lo, double hi,
                                      const RootOptions& opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    const double ftol = opt.tol * std::max(1.0, opt.f_scale);
    if (std::abs(flo) <= ftol) return {lo, flo, 0, true};
    if (std::abs(fhi) <= ftol) return {hi, fhi, 0, true};
    if ((flo < 0) == (fhi < 0))
        throw std::invalid_argument("find_root_bracketed: endpoints do not bracket a root");

    RootResult res;
    double x = lo, fx = flo;
    bool force_bisect = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
        double width = hi - lo;
        x = 0.5 * (lo + hi);
        if (!force_bisect && fhi != flo) {
            // Secant candidate from the bracket endpoints, kept strictly inside.
            double s = hi - fhi * (hi - lo) / (fhi - flo);
            if (s > lo && s < hi) x = s;
        }
        fx = f(x);
        res.iterations = it;
        if (std::abs(fx) <= ftol || width <= 1e-15 * std::max(1.0, std::abs(x))) {
            res.x = x;
            res.fx = fx;
            res.converged = std::abs(fx) <= std::max(ftol, 1e3 * ftol);
            return res;
        }
        if ((fx < 0) == (flo < 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        // Stagnating secant iterates are followed by a pure bisection step.
        force_bisect = (hi - lo) > 0.5 * width;
    }
    res.x = x;
    res.fx = fx;
    res.converged = std::abs(fx) <= 1e3 * ftol;
    return res;
}

}  // namespace divrisk
