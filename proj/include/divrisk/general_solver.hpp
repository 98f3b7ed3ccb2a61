#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "divrisk/divergence.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/integrand.hpp"
#include "divrisk/numeric.hpp"
#include "divrisk/options.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {

/// Dual point: theta1 multiplies the normalization constraint, theta2 the payoff.
struct Theta {
    double t1 = 0.0;
    double t2 = 0.0;
};

/// How a general divergence ball resolves.  newton_path / conjugate_path tag
/// which algorithm produced the tangent solution; prop1_analogue marks radii
/// at or past the cap where all mass sits on the cheapest payoff;
/// infeasible_kmax_zero marks problems with no usable negative tilt.
enum class GeneralCase { NewtonPath, ConjugatePath, Prop1Analogue, InfeasibleKmaxZero, KZero };

inline const char* case_tag(GeneralCase c) {
    switch (c) {
        case GeneralCase::NewtonPath: return "newton_path";
        case GeneralCase::ConjugatePath: return "conjugate_path";
        case GeneralCase::Prop1Analogue: return "prop1_analogue";
        case GeneralCase::InfeasibleKmaxZero: return "infeasible_kmax_zero";
        case GeneralCase::KZero: return "k_zero";
    }
    return "?";
}

/**
 * @brief A scenario set paired with the integrand of its divergence ball.
 *
 * Construction checks that the baseline density has zero cost, the anchor
 * every radius is measured from.
 */
class GeneralProblem {
  public:
    GeneralProblem(ScenarioSet set, Integrand integrand)
        : set_(std::move(set)), integrand_(std::move(integrand)) {
        if (set_.degenerate())
            throw std::invalid_argument("general solver: degenerate scenario set refused");
        if (integrand_.size() != set_.size())
            throw std::invalid_argument("general solver: integrand size mismatch");
        DensityVector p0 = baseline_density(set_);
        double h0 = 0.0;
        for (std::size_t i = 0; i < set_.size(); ++i)
            h0 += set_.ref_weight(i) * integrand_.beta(i, p0[i]);
        if (!(std::abs(h0) <= 1e-10))
            throw std::invalid_argument("general solver: baseline density has nonzero cost " +
                                        std::to_string(h0));
        double var = 0.0;
        for (std::size_t i = 0; i < set_.size(); ++i) {
            double d = set_.payoff(i) - set_.b0();
            var += d * d * set_.base_prob(i);
        }
        sigma0_ = std::sqrt(std::max(var, 1e-30));
    }

    const ScenarioSet& set() const { return set_; }
    const Integrand& integrand() const { return integrand_; }
    double baseline_std() const { return sigma0_; }

  private:
    ScenarioSet set_;
    Integrand integrand_;
    double sigma0_ = 1.0;
};

/// K(theta) = sum_i beta*(r_i, theta1 + theta2 x_i) w_i; +inf outside the domain.
inline double k_eval(const GeneralProblem& pr, Theta th) {
    const ScenarioSet& s = pr.set();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double v = pr.integrand().beta_star(i, th.t1 + th.t2 * s.payoff(i));
        if (is_pos_inf(v)) return pos_inf;
        acc += s.ref_weight(i) * v;
    }
    return acc;
}

struct KGrad {
    double mass = 0.0;   // d/dtheta1: total mass of the tilted density
    double xmass = 0.0;  // d/dtheta2: payoff integral of the tilted density
};

/// Gradient of K; entries are +inf on and beyond the domain boundary.
inline KGrad k_grad(const GeneralProblem& pr, Theta th) {
    const ScenarioSet& s = pr.set();
    KGrad g;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double d = pr.integrand().beta_star_prime(i, th.t1 + th.t2 * s.payoff(i));
        if (is_pos_inf(d)) {
            g.mass = pos_inf;
            g.xmass = s.payoff(i) >= 0.0 ? pos_inf : neg_inf;
            return g;
        }
        g.mass += s.ref_weight(i) * d;
        g.xmass += s.ref_weight(i) * s.payoff(i) * d;
    }
    return g;
}

/// Member of the tilted family at theta (not necessarily normalized).
inline DensityVector p_theta(const GeneralProblem& pr, Theta th) {
    const ScenarioSet& s = pr.set();
    DensityVector d;
    d.values.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        d.values[i] = pr.integrand().beta_star_prime(i, th.t1 + th.t2 * s.payoff(i));
    return d;
}

/// Cost H(p) = sum_i beta(r_i, p_i) w_i of a density.
inline double h_eval(const GeneralProblem& pr, const DensityVector& p) {
    const ScenarioSet& s = pr.set();
    validate_density(p, s);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        acc = sat_add(acc, sat_mul(s.ref_weight(i), pr.integrand().beta(i, p[i])));
    return acc;
}

/// Supremum of admissible theta1 at fixed theta2 (open constraint).
inline double theta1_sup(const GeneralProblem& pr, double theta2) {
    const ScenarioSet& s = pr.set();
    double sup = pos_inf;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double bi = pr.integrand().beta_prime_inf(i);
        if (is_pos_inf(bi)) continue;
        sup = std::min(sup, bi - theta2 * s.payoff(i));
    }
    return sup;
}

/// Strict interior test of the dual domain.
inline bool in_theta_domain(const GeneralProblem& pr, Theta th, double margin = 0.0) {
    const ScenarioSet& s = pr.set();
    for (std::size_t i = 0; i < s.size(); ++i) {
        double bi = pr.integrand().beta_prime_inf(i);
        if (!is_pos_inf(bi) && th.t1 + th.t2 * s.payoff(i) >= bi - margin) return false;
    }
    return is_finite(k_eval(pr, th));
}

namespace detail {

struct InnerSolve {
    double theta1 = 0.0;
    double mass_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool boundary = false;  // mass saturates below 1 at the domain edge
};

/// theta1 with unit tilted mass at fixed theta2.  When the conjugate slope is
/// bounded the mass can plateau below 1; that is reported as a boundary hit.
inline InnerSolve solve_theta1(const GeneralProblem& pr, double theta2,
                               const SolverOptions& opts) {
    auto mass_at = [&](double t1) { return k_grad(pr, {t1, theta2}).mass; };
    double sup = theta1_sup(pr, theta2);
    InnerSolve out;

    double hi = 0.0;
    bool hi_found = false;
    if (is_pos_inf(sup)) {
        hi = 1.0;
        for (int j = 0; j <= 60 && !hi_found; ++j, hi *= 2.0)
            if (mass_at(hi) >= 1.0) hi_found = true;
        if (hi_found) hi /= 2.0;
    } else {
        double scale = std::max(1.0, std::abs(sup));
        for (int j = 1; j <= 60 && !hi_found; ++j) {
            hi = sup - scale * std::pow(2.0, -j);
            // The constraint is open; a probe that rounds onto the edge would
            // misread the edge infinity as saturated mass.
            if (!(hi < sup)) break;
            double m = mass_at(hi);
            if (is_pos_inf(m) || m >= 1.0) hi_found = true;
        }
    }
    if (!hi_found) {
        // Mass saturates below 1: supremum of the dual sits on the boundary.
        out.theta1 = is_pos_inf(sup) ? pos_inf : sup;
        out.boundary = true;
        return out;
    }
    double mhi = mass_at(hi);
    if (is_pos_inf(mhi)) {
        // Walk back inside until the mass is finite.
        double lo_ref = hi - std::max(1.0, std::abs(hi));
        for (int j = 0; j < 120 && is_pos_inf(mhi); ++j) {
            hi = 0.5 * (hi + lo_ref);
            mhi = mass_at(hi);
        }
        if (is_pos_inf(mhi)) {
            out.boundary = true;
            out.theta1 = hi;
            return out;
        }
    }
    if (mhi < 1.0) {
        // Finite mass below 1 after walking back: re-expand toward sup.
        double step = is_pos_inf(sup) ? std::max(1.0, std::abs(hi)) : 0.5 * (sup - hi);
        for (int j = 0; j <= 200 && mhi < 1.0; ++j) {
            hi += step;
            if (!is_pos_inf(sup)) {
                step *= 0.5;
                if (!(hi < sup)) hi = std::nextafter(sup, neg_inf);
            }
            mhi = mass_at(hi);
            if (is_pos_inf(mhi)) {
                hi -= step * 2.0;
                mhi = mass_at(hi);
                break;
            }
        }
        if (mhi < 1.0) {
            out.boundary = true;
            out.theta1 = hi;
            return out;
        }
    }

    double lo = hi;
    double mlo = mhi;
    double step = std::max(1.0, std::abs(hi));
    for (int j = 0; j <= 60 && mlo >= 1.0; ++j) {
        lo -= step;
        step *= 2.0;
        mlo = mass_at(lo);
    }
    if (mlo >= 1.0) throw std::runtime_error("inner mass equation: cannot bracket from below");

    RootOptions ropt;
    ropt.tol = opts.root_tol;
    ropt.f_scale = 1.0;
    ropt.max_iter = opts.max_iter;
    RootResult r = find_root_bracketed([&](double t1) { return mass_at(t1) - 1.0; }, lo, hi, ropt);
    out.theta1 = r.x;
    out.mass_residual = std::abs(r.fx);
    out.iterations = r.iterations;
    out.converged = r.converged;
    return out;
}

struct ManifoldPoint {
    Theta theta;
    double mean = 0.0;
    double mass_residual = 0.0;
    bool ok = false;
};

/// Point of the unit-mass manifold at fixed theta2, with its tilted mean.
inline ManifoldPoint manifold_point(const GeneralProblem& pr, double theta2,
                                    const SolverOptions& opts) {
    ManifoldPoint mp;
    InnerSolve in = solve_theta1(pr, theta2, opts);
    if (!in.converged) return mp;
    mp.theta = {in.theta1, theta2};
    KGrad g = k_grad(pr, mp.theta);
    mp.mean = g.xmass;
    mp.mass_residual = in.mass_residual;
    mp.ok = true;
    return mp;
}

}  // namespace detail

struct FOfBResult {
    double value = 0.0;  // minimal cost of reaching mean b
    Theta theta;
    double mean_residual = 0.0;
    double mass_residual = 0.0;
    int iterations = 0;
};

/**
 * @brief Smallest cost of a normalized density with mean b, computed from the
 * dual as sup over theta of theta1 + theta2 b - K(theta).
 *
 * The supremum is taken by sliding along the unit-mass manifold: the inner
 * equation fixes theta1, the outer equation matches the tilted mean to b.
 * Requires min payoff < b <= baseline mean.
 */
inline FOfBResult f_of_b(const GeneralProblem& pr, double b, const SolverOptions& opts = {}) {
    const ScenarioSet& s = pr.set();
    if (!(b > s.min_payoff()) || !(b <= s.b0()))
        throw std::invalid_argument("f_of_b: b must lie in (min payoff, baseline mean]");

    auto mean_at = [&](double t2) {
        detail::ManifoldPoint mp = detail::manifold_point(pr, t2, opts);
        if (!mp.ok) throw std::runtime_error("f_of_b: inner mass equation failed");
        return mp;
    };

    double hi = 0.0;  // mean(0) = b0 >= b
    double lo = -1.0 / std::max(pr.baseline_std(), 1e-6);
    bool found = false;
    for (int j = 0; j <= 60; ++j) {
        if (mean_at(lo).mean <= b) {
            found = true;
            break;
        }
        lo *= 2.0;
    }
    if (!found) throw std::runtime_error("f_of_b: cannot bracket the mean");

    RootOptions ropt;
    ropt.tol = opts.root_tol;
    ropt.f_scale = std::max(1.0, std::abs(b));
    ropt.max_iter = opts.max_iter;
    RootResult r = find_root_bracketed([&](double t2) { return mean_at(t2).mean - b; }, lo, hi, ropt);

    detail::ManifoldPoint mp = mean_at(r.x);
    FOfBResult out;
    out.theta = mp.theta;
    out.value = mp.theta.t1 + mp.theta.t2 * b - k_eval(pr, mp.theta);
    out.mean_residual = std::abs(mp.mean - b);
    out.mass_residual = mp.mass_residual;
    out.iterations = r.iterations;
    return out;
}

/**
 * @brief Radius at which the ball saturates: the cheapest cost of putting all
 * mass on the minimal payoff.  +inf when some other scenario is infinitely
 * expensive to empty.
 */
inline double kmax_general(const GeneralProblem& pr, const SolverOptions& opts = {}) {
    const ScenarioSet& s = pr.set();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s.at_min(i) && is_pos_inf(pr.integrand().beta_zero(i))) return pos_inf;

    // Restricted problem on the argmin scenarios: unit mass at minimal cost.
    auto mass_at = [&](double t) {
        double m = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s.at_min(i)) continue;
            double d = pr.integrand().beta_star_prime(i, t);
            if (is_pos_inf(d)) return pos_inf;
            m += s.ref_weight(i) * d;
        }
        return m;
    };
    double sup = pos_inf;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.at_min(i) && !is_pos_inf(pr.integrand().beta_prime_inf(i)))
            sup = std::min(sup, pr.integrand().beta_prime_inf(i));

    double hi = 0.0;
    bool hi_found = false;
    if (is_pos_inf(sup)) {
        hi = 1.0;
        for (int j = 0; j <= 60 && !hi_found; ++j, hi *= 2.0)
            if (mass_at(hi) >= 1.0) hi_found = true;
    } else {
        double scale = std::max(1.0, std::abs(sup));
        for (int j = 1; j <= 60 && !hi_found; ++j) {
            hi = sup - scale * std::pow(2.0, -j);
            if (!(hi < sup)) break;  // keep probes strictly inside the open domain
            double m = mass_at(hi);
            if (is_pos_inf(m) || m >= 1.0) hi_found = true;
        }
    }
    if (!hi_found) return pos_inf;  // argmin scenarios cannot absorb unit mass
    while (is_pos_inf(mass_at(hi))) hi -= 1e-9 * std::max(1.0, std::abs(hi));
    double lo = hi, mlo = mass_at(lo), step = std::max(1.0, std::abs(hi));
    for (int j = 0; j <= 60 && mlo >= 1.0; ++j) {
        lo -= step;
        step *= 2.0;
        mlo = mass_at(lo);
    }
    RootOptions ropt;
    ropt.tol = opts.root_tol;
    ropt.max_iter = opts.max_iter;
    RootResult r = find_root_bracketed([&](double t) { return mass_at(t) - 1.0; }, lo, hi, ropt);

    double kmax = r.x;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.at_min(i))
            kmax -= s.ref_weight(i) * pr.integrand().beta_star(i, r.x);
        else
            kmax += s.ref_weight(i) * pr.integrand().beta_zero(i);
    }
    return kmax;
}

/// Existence of a usable negative tilt: some theta with theta2 < 0 in the
/// domain of K.  Always true for the built-in integrands.
inline bool has_negative_tilt(const GeneralProblem& pr) {
    for (double t2 : {-1e-3, -1e-2, -0.1, -1.0}) {
        double sup = theta1_sup(pr, t2);
        double t1 = is_pos_inf(sup) ? 0.0 : sup - std::max(1.0, std::abs(sup));
        for (int j = 0; j < 40; ++j) {
            if (is_finite(k_eval(pr, {t1, t2}))) return true;
            t1 -= std::max(1.0, std::abs(t1));
        }
    }
    return false;
}

struct GeneralSolveReport {
    double k = 0.0;
    double k_max = pos_inf;
    GeneralCase case_tag = GeneralCase::NewtonPath;
    double value = 0.0;
    double model_risk = 0.0;
    bool attained = false;
    std::optional<Theta> theta_bar;
    std::optional<double> b_star;  // conjugate path: the root in b
    std::optional<DensityVector> worst_density;
    double residual_mass = 0.0;        // |unit-mass equation|
    double residual_constraint = 0.0;  // |radius equation|
    int iterations = 0;
};

namespace detail {

inline void finish_tangent_report(const GeneralProblem& pr, GeneralSolveReport& rep, Theta th) {
    KGrad g = k_grad(pr, th);
    rep.theta_bar = th;
    rep.value = g.xmass;
    rep.model_risk = -rep.value;
    rep.attained = true;
    rep.worst_density = p_theta(pr, th);
    rep.residual_mass = std::abs(g.mass - 1.0);
    rep.residual_constraint = std::abs(th.t1 + th.t2 * g.xmass - k_eval(pr, th) - rep.k);
}

}  // namespace detail

/**
 * @brief Tangent solve by a damped two-variable Newton iteration on the
 * stationarity system (unit mass, radius matched), with finite-difference
 * curvature assembled from exact gradients.
 */
inline GeneralSolveReport solve_newton(const GeneralProblem& pr, double k,
                                       const SolverOptions& opts = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("solve_newton: k must be > 0");
    GeneralSolveReport rep;
    rep.k = k;
    rep.case_tag = GeneralCase::NewtonPath;

    double t2 = -std::sqrt(2.0 * k) / pr.baseline_std();
    detail::InnerSolve in;
    for (int j = 0; j < 60; ++j) {
        in = detail::solve_theta1(pr, t2, opts);
        if (in.converged) break;
        t2 *= 0.5;
    }
    if (!in.converged) throw std::runtime_error("solve_newton: no usable starting point");
    Theta th{in.theta1, t2};

    auto G = [&](Theta t) -> std::pair<double, double> {
        KGrad g = k_grad(pr, t);
        double kv = k_eval(pr, t);
        if (!is_finite(g.mass) || !is_finite(kv)) return {pos_inf, pos_inf};
        return {g.mass - 1.0, t.t1 + t.t2 * g.xmass - kv - k};
    };
    auto norm = [](std::pair<double, double> v) {
        return std::max(std::abs(v.first), std::abs(v.second));
    };

    auto [g1, g2] = G(th);
    double gn = norm({g1, g2});
    const double target = opts.newton_tol * std::max(1.0, k);
    int it = 0;
    for (; it < opts.max_iter && gn > target; ++it) {
        double h1 = 1e-7 * std::max(1.0, std::abs(th.t1));
        double h2 = 1e-7 * std::max(1.0, std::abs(th.t2));
        KGrad gp1 = k_grad(pr, {th.t1 + h1, th.t2});
        KGrad gm1 = k_grad(pr, {th.t1 - h1, th.t2});
        KGrad gp2 = k_grad(pr, {th.t1, th.t2 + h2});
        KGrad gm2 = k_grad(pr, {th.t1, th.t2 - h2});
        if (is_pos_inf(gp1.mass) || is_pos_inf(gp2.mass))
            throw std::runtime_error("solve_newton: curvature probe left the domain");
        double H11 = (gp1.mass - gm1.mass) / (2.0 * h1);
        double H12 = (gp2.mass - gm2.mass) / (2.0 * h2);
        double H22 = (gp2.xmass - gm2.xmass) / (2.0 * h2);
        KGrad g = k_grad(pr, th);
        // Jacobian of the system in (theta1, theta2).
        double J11 = H11, J12 = H12;
        double J21 = 1.0 + th.t2 * H12 - g.mass;
        double J22 = th.t2 * H22;
        double det = J11 * J22 - J12 * J21;
        if (!(std::abs(det) > 1e-300)) throw std::runtime_error("solve_newton: singular curvature");
        double d1 = -(J22 * g1 - J12 * g2) / det;
        double d2 = -(-J21 * g1 + J11 * g2) / det;

        bool stepped = false;
        for (double lam = 1.0; lam >= std::pow(2.0, -40); lam *= 0.5) {
            Theta cand{th.t1 + lam * d1, th.t2 + lam * d2};
            if (!in_theta_domain(pr, cand, 1e-13)) continue;
            auto gc = G(cand);
            if (norm(gc) < gn * (1.0 - 0.25 * lam)) {
                th = cand;
                g1 = gc.first;
                g2 = gc.second;
                gn = norm(gc);
                stepped = true;
                break;
            }
        }
        if (!stepped) throw std::runtime_error("solve_newton: line search stalled");
    }
    if (gn > target) throw std::runtime_error("solve_newton: iteration cap reached");
    if (!(th.t2 < 0.0)) throw std::runtime_error("solve_newton: tilt is not negative");

    rep.iterations = it;
    detail::finish_tangent_report(pr, rep, th);
    return rep;
}

/**
 * @brief Tangent solve from the conjugate side: bisection on the mean b of
 * the radius equation F(b) = k, where F is the minimal cost of mean b.
 */
inline GeneralSolveReport solve_conjugate(const GeneralProblem& pr, double k,
                                          const SolverOptions& opts = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("solve_conjugate: k must be > 0");
    const ScenarioSet& s = pr.set();
    GeneralSolveReport rep;
    rep.k = k;
    rep.case_tag = GeneralCase::ConjugatePath;

    double m = s.min_payoff(), b0 = s.b0();
    auto costgap = [&](double b) { return f_of_b(pr, b, opts).value - k; };

    double lo = 0.0;
    bool found = false;
    for (int j = 1; j <= 60 && !found; ++j) {
        lo = m + (b0 - m) * std::pow(2.0, -j);
        if (costgap(lo) >= 0.0) found = true;
    }
    if (!found) throw std::runtime_error("solve_conjugate: radius below reachable range");

    RootOptions ropt;
    ropt.tol = opts.conjugate_tol;
    ropt.f_scale = std::max(1.0, k);
    ropt.max_iter = opts.max_iter;
    RootResult r = find_root_bracketed(costgap, lo, b0, ropt);

    FOfBResult fb = f_of_b(pr, r.x, opts);
    rep.b_star = r.x;
    rep.iterations = r.iterations + fb.iterations;
    rep.residual_constraint = std::abs(r.fx);
    rep.theta_bar = fb.theta;
    KGrad g = k_grad(pr, fb.theta);
    rep.value = g.xmass;
    rep.model_risk = -rep.value;
    rep.attained = true;
    rep.worst_density = p_theta(pr, fb.theta);
    rep.residual_mass = std::abs(g.mass - 1.0);
    return rep;
}

/**
 * @brief Worst expected payoff over the divergence ball of radius k,
 * dispatching on the radius and falling back from the Newton path to the
 * conjugate path when the iteration does not converge.
 */
inline GeneralSolveReport solve(const GeneralProblem& pr, double k, const SolverOptions& opts = {}) {
    if (k < 0.0) throw std::invalid_argument("radius k must be >= 0");
    const ScenarioSet& s = pr.set();
    GeneralSolveReport rep;
    rep.k = k;
    rep.k_max = kmax_general(pr, opts);

    if (k == 0.0) {
        rep.case_tag = GeneralCase::KZero;
        rep.value = s.b0();
        rep.model_risk = -rep.value;
        rep.attained = true;
        rep.theta_bar = Theta{0.0, 0.0};
        rep.worst_density = baseline_density(s);
        return rep;
    }
    if (!(rep.k_max > 0.0)) {
        rep.case_tag = GeneralCase::InfeasibleKmaxZero;
        rep.value = s.b0();
        rep.model_risk = -rep.value;
        rep.attained = false;
        return rep;
    }
    if (is_finite(rep.k_max) && k >= rep.k_max) {
        rep.case_tag = GeneralCase::Prop1Analogue;
        rep.value = s.min_payoff();
        rep.model_risk = -rep.value;
        rep.attained = true;
        // Restricted unit-mass density on the argmin scenarios.
        auto mass_at = [&](double t) {
            double mm = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (s.at_min(i)) {
                    double d = pr.integrand().beta_star_prime(i, t);
                    if (is_pos_inf(d)) return pos_inf;
                    mm += s.ref_weight(i) * d;
                }
            return mm;
        };
        double sup = pos_inf;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.at_min(i) && !is_pos_inf(pr.integrand().beta_prime_inf(i)))
                sup = std::min(sup, pr.integrand().beta_prime_inf(i));
        double hi = 0.0;
        bool hi_found = false;
        if (is_pos_inf(sup)) {
            hi = 1.0;
            for (int j = 0; j <= 60 && !hi_found; ++j, hi *= 2.0)
                if (mass_at(hi) >= 1.0) hi_found = true;
        } else {
            double scale = std::max(1.0, std::abs(sup));
            for (int j = 1; j <= 60 && !hi_found; ++j) {
                hi = sup - scale * std::pow(2.0, -j);
                if (!(hi < sup)) break;  // keep probes strictly inside the open domain
                double mm = mass_at(hi);
                if (is_pos_inf(mm) || mm >= 1.0) hi_found = true;
            }
        }
        if (hi_found) {
            while (is_pos_inf(mass_at(hi))) hi -= 1e-9 * std::max(1.0, std::abs(hi));
            double lo = hi, mlo = mass_at(lo), step = std::max(1.0, std::abs(hi));
            for (int j = 0; j <= 60 && mlo >= 1.0; ++j) {
                lo -= step;
                step *= 2.0;
                mlo = mass_at(lo);
            }
            RootOptions ropt;
            ropt.tol = opts.root_tol;
            ropt.max_iter = opts.max_iter;
            RootResult r =
                find_root_bracketed([&](double t) { return mass_at(t) - 1.0; }, lo, hi, ropt);
            DensityVector d;
            d.values.resize(s.size(), 0.0);
            for (std::size_t i = 0; i < s.size(); ++i)
                if (s.at_min(i)) d.values[i] = pr.integrand().beta_star_prime(i, r.x);
            rep.worst_density = std::move(d);
            rep.residual_mass = std::abs(mass_at(r.x) - 1.0);
            rep.iterations = r.iterations;
        }
        return rep;
    }

    try {
        GeneralSolveReport nrep = solve_newton(pr, k, opts);
        nrep.k_max = rep.k_max;
        return nrep;
    } catch (const std::runtime_error&) {
        GeneralSolveReport crep = solve_conjugate(pr, k, opts);
        crep.k_max = rep.k_max;
        return crep;
    }
}

}  // namespace divrisk
