#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "divrisk/extended_real.hpp"

namespace divrisk {

/**
 * @brief Convex kernel record: a convex function f on [0, inf) together with
 * the boundary data and conjugate machinery the solvers need.
 *
 * The conjugate is taken over nonnegative arguments,
 * f*(x) = sup_{s >= 0} (x s - f(s)), so f*(x) = -f(0) for x <= f'(0+).
 * User-defined kernels plug in by filling this record; `kernel_self_check`
 * verifies the pieces fit together.
 */
struct ConvexKernel {
    std::string name;
    std::function<double(double)> f;           // f(s), s >= 0; +inf allowed
    std::function<double(double)> f_prime;     // f'(s), s > 0
    std::function<double(double)> conj;        // f*(x); +inf above f'(inf)
    std::function<double(double)> conj_prime;  // (f*)'(x); 0 below f'(0+)
    double f_zero = 0.0;       // f(0), +inf allowed
    double f_prime_zero = 0.0; // f'(0+), -inf allowed
    double f_prime_inf = 0.0;  // f'(inf), +inf iff cofinite
    bool cofinite = false;     // f(s)/s -> +inf
    bool differentiable = true;
    bool divergence_normalized = false;  // f(1) = 0 and f >= 0
};

inline double kernel_conjugate(const ConvexKernel& k, double x) { return k.conj(x); }

/// Derivative of the conjugate with saturation at both ends: 0 at or below
/// f'(0+), +inf at or above a finite f'(inf), interior value otherwise.
inline double kernel_conjugate_deriv(const ConvexKernel& k, double x) {
    if (x <= k.f_prime_zero) return 0.0;
    if (!k.cofinite && x >= k.f_prime_inf) return pos_inf;
    return k.conj_prime(x);
}

/// Bregman distance f(s) - f(t) - f'(t)(s - t) for s, t >= 0.
/// At t = 0 the convention is the limiting one: 0 when s = 0, and +inf when
/// s > 0 unless both f(0) and f'(0+) are finite.
inline double bregman_delta(const ConvexKernel& k, double s, double t) {
    if (!k.differentiable)
        throw std::invalid_argument("bregman_delta: kernel '" + k.name + "' is not differentiable");
    if (s < 0.0 || t < 0.0)
        throw std::invalid_argument("bregman_delta: arguments must be nonnegative");
    if (t == 0.0) {
        if (s == 0.0) return 0.0;
        if (!is_finite(k.f_zero) || !is_finite(k.f_prime_zero)) return pos_inf;
        return sat_add(k.f(s), -k.f_zero - k.f_prime_zero * s);
    }
    double fs = (s == 0.0) ? k.f_zero : k.f(s);
    if (is_pos_inf(fs)) return pos_inf;
    return fs - k.f(t) - k.f_prime(t) * (s - t);
}

/**
 * @brief Power kernel family indexed by a real exponent.
 *
 * alpha = 1 gives s log s - s + 1, alpha = 0 gives -log s + s - 1, any other
 * alpha gives (s^alpha - alpha (s - 1) - 1) / (alpha (alpha - 1)).  All are
 * normalized, f(1) = 0 and f'(1) = 0.  The kernel is cofinite iff alpha >= 1.
 */
inline ConvexKernel power_kernel(double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("power_kernel: alpha must be finite");
    ConvexKernel k;
    {
        std::ostringstream name;
        name << "power:" << alpha;
        k.name = name.str();
    }
    k.differentiable = true;
    k.divergence_normalized = true;
    if (alpha == 1.0) {
        k.f = [](double s) { return s == 0.0 ? 1.0 : s * std::log(s) - s + 1.0; };
        k.f_prime = [](double s) { return std::log(s); };
        k.conj = [](double x) { return std::expm1(x); };
        k.conj_prime = [](double x) { return std::exp(x); };
        k.f_zero = 1.0;
        k.f_prime_zero = neg_inf;
        k.f_prime_inf = pos_inf;
        k.cofinite = true;
        return k;
    }
    if (alpha == 0.0) {
        k.f = [](double s) { return s == 0.0 ? pos_inf : -std::log(s) + s - 1.0; };
        k.f_prime = [](double s) { return 1.0 - 1.0 / s; };
        k.conj = [](double x) { return x < 1.0 ? -std::log1p(-x) : pos_inf; };
        k.conj_prime = [](double x) { return 1.0 / (1.0 - x); };
        k.f_zero = pos_inf;
        k.f_prime_zero = neg_inf;
        k.f_prime_inf = 1.0;
        k.cofinite = false;
        return k;
    }
    const double a = alpha;
    const double denom = a * (a - 1.0);
    k.f = [a, denom](double s) {
        if (s == 0.0) return a > 0.0 ? 1.0 / a : pos_inf;
        return (std::pow(s, a) - a * (s - 1.0) - 1.0) / denom;
    };
    k.f_prime = [a](double s) { return (std::pow(s, a - 1.0) - 1.0) / (a - 1.0); };
    k.f_zero = a > 0.0 ? 1.0 / a : pos_inf;
    k.f_prime_zero = a > 1.0 ? 1.0 / (1.0 - a) : neg_inf;
    k.f_prime_inf = a > 1.0 ? pos_inf : 1.0 / (1.0 - a);
    k.cofinite = a > 1.0;
    // Conjugate: with u = 1 + (alpha - 1) x, the interior value is
    // (u^{alpha/(alpha-1)} - 1)/alpha, clamped at the boundary slopes.
    const double expo = a / (a - 1.0);
    const double fpz = k.f_prime_zero, fpi = k.f_prime_inf;
    k.conj = [a, expo, fpz, fpi](double x) {
        if (x <= fpz) return -1.0 / a;  // sup at s = 0, alpha > 1 only
        if (x > fpi) return pos_inf;
        double u = 1.0 + (a - 1.0) * x;
        if (u < 0.0) u = 0.0;
        double v = (std::pow(u, expo) - 1.0) / a;
        return v;  // +inf at u = 0 for 0 < alpha < 1, finite -1/alpha for alpha < 0
    };
    k.conj_prime = [a, fpz, fpi](double x) {
        if (x <= fpz) return 0.0;
        if (x >= fpi) return pos_inf;
        double u = 1.0 + (a - 1.0) * x;
        if (u < 0.0) u = 0.0;
        return std::pow(u, 1.0 / (a - 1.0));
    };
    return k;
}

/// -log s; the Itakura-Saito generator.  Not normalized (f'(1) = -1), meant
/// for Bregman construction where its distance is s/t - log(s/t) - 1.
inline ConvexKernel itakura_saito_kernel() {
    ConvexKernel k;
    k.name = "is";
    k.f = [](double s) { return s == 0.0 ? pos_inf : -std::log(s); };
    k.f_prime = [](double s) { return -1.0 / s; };
    k.conj = [](double x) { return x < 0.0 ? -1.0 - std::log(-x) : pos_inf; };
    k.conj_prime = [](double x) { return -1.0 / x; };
    k.f_zero = pos_inf;
    k.f_prime_zero = neg_inf;
    k.f_prime_inf = 0.0;
    k.cofinite = false;
    k.differentiable = true;
    k.divergence_normalized = false;
    return k;
}

/// s^2; quadratic generator whose Bregman distance is (s - t)^2.
inline ConvexKernel quadratic_kernel() {
    ConvexKernel k;
    k.name = "square";
    k.f = [](double s) { return s * s; };
    k.f_prime = [](double s) { return 2.0 * s; };
    k.conj = [](double x) { return x > 0.0 ? 0.25 * x * x : 0.0; };
    k.conj_prime = [](double x) { return x > 0.0 ? 0.5 * x : 0.0; };
    k.f_zero = 0.0;
    k.f_prime_zero = 0.0;
    k.f_prime_inf = pos_inf;
    k.cofinite = true;
    k.differentiable = true;
    k.divergence_normalized = false;
    return k;
}

/// Sampled consistency checks tying the record's pieces together; throws on
/// the first violation.  Cheap enough to run when accepting a user kernel.
inline void kernel_self_check(const ConvexKernel& k) {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("kernel '" + k.name + "': " + what);
    };
    if (!k.f || !k.conj || !k.conj_prime) fail("missing f, conj or conj_prime");
    if (k.cofinite != is_pos_inf(k.f_prime_inf)) fail("cofinite flag contradicts f_prime_inf");
    if (k.f(0.0) != k.f_zero && !(is_pos_inf(k.f(0.0)) && is_pos_inf(k.f_zero)))
        fail("f(0) disagrees with f_zero");
    if (k.divergence_normalized && std::abs(k.f(1.0)) > 1e-12) fail("f(1) != 0");

    const double ss[] = {1e-6, 0.02, 0.3, 0.7, 1.0, 1.4, 2.5, 7.0, 40.0};
    // Midpoint convexity on a sample grid.
    for (double s : ss)
        for (double t : ss) {
            double lhs = k.f(0.5 * (s + t));
            double rhs = 0.5 * k.f(s) + 0.5 * k.f(t);
            if (is_finite(rhs) && lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs)))
                fail("f fails midpoint convexity");
            if (k.divergence_normalized && k.f(s) < -1e-12) fail("f takes negative values");
        }
    // Fenchel-Young on a sample grid, with equality along x = f'(s).
    const double hi = is_finite(k.f_prime_inf) ? k.f_prime_inf : 5.0;
    const double lo = is_finite(k.f_prime_zero) ? k.f_prime_zero - 2.0 : -6.0;
    for (int i = 0; i <= 12; ++i) {
        double x = lo + (hi - lo) * i / 12.0 - 1e-9;
        double fs_x = k.conj(x);
        if (!is_finite(fs_x)) continue;
        for (double s : ss) {
            double lhs = x * s;
            double rhs = sat_add(k.f(s), fs_x);
            if (is_finite(rhs) && lhs > rhs + 1e-8 * std::max(1.0, std::abs(rhs)))
                fail("Fenchel-Young inequality fails");
        }
    }
    if (k.differentiable && k.f_prime) {
        for (double s : ss) {
            double x = k.f_prime(s);
            if (!is_finite(x) || x >= k.f_prime_inf) continue;
            double gap = k.f(s) + k.conj(x) - x * s;
            if (std::abs(gap) > 1e-8 * std::max(1.0, std::abs(x * s)))
                fail("Fenchel-Young equality fails at x = f'(s)");
            double s_back = kernel_conjugate_deriv(k, x);
            if (std::abs(s_back - s) > 1e-7 * std::max(1.0, s))
                fail("(f*)' does not invert f'");
        }
    }
}

}  // namespace divrisk
