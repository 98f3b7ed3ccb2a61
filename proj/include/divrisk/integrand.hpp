#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "divrisk/divergence_spec.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/kernel.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {

enum class IntegrandForm { Autonomous, Weighted, Bregman };

/**
 * @brief Per-scenario convex integrand beta(r, s) whose weighted sum over the
 * reference measure reproduces the chosen divergence of a density from the
 * baseline, together with its conjugate in the second argument.
 *
 * Autonomous and weighted forms scale the kernel through the baseline
 * density q_i: beta_i(s) = [w_i] q_i f(s / q_i), so that
 * beta*_i(x) = q_i [w_i] f*(x / [w_i]) and the conjugate derivative is
 * q_i (f*)'(x / [w_i]).  The Bregman form is beta_i(s) = Delta_f(s, q_i) with
 * beta*_i(x) = f*(x + f'(q_i)) - f*(f'(q_i)).
 */
class Integrand {
  public:
    Integrand(IntegrandForm form, ConvexKernel kernel, std::vector<double> base,
              std::vector<double> wfac)
        : form_(form), kernel_(std::move(kernel)), base_(std::move(base)), wfac_(std::move(wfac)) {
        if (form_ == IntegrandForm::Bregman) {
            shift_.resize(base_.size());
            for (std::size_t i = 0; i < base_.size(); ++i)
                shift_[i] = base_[i] > 0.0 ? kernel_.f_prime(base_[i]) : kernel_.f_prime_zero;
        }
    }

    std::size_t size() const { return base_.size(); }
    IntegrandForm form() const { return form_; }
    const ConvexKernel& kernel() const { return kernel_; }

    /// beta(r_i, s) for s >= 0; +inf allowed.
    double beta(std::size_t i, double s) const {
        switch (form_) {
            case IntegrandForm::Autonomous: {
                double q = base_[i];
                return sat_mul(q, s == 0.0 ? kernel_.f_zero : kernel_.f(s / q));
            }
            case IntegrandForm::Weighted: {
                double q = base_[i];
                return sat_mul(wfac_[i] * q, s == 0.0 ? kernel_.f_zero : kernel_.f(s / q));
            }
            case IntegrandForm::Bregman:
                return bregman_delta(kernel_, s, base_[i]);
        }
        return 0.0;
    }

    /// Conjugate of beta(r_i, .) over s >= 0.
    double beta_star(std::size_t i, double x) const {
        switch (form_) {
            case IntegrandForm::Autonomous:
                return sat_mul(base_[i], kernel_.conj(x));
            case IntegrandForm::Weighted:
                return sat_mul(base_[i] * wfac_[i], kernel_.conj(x / wfac_[i]));
            case IntegrandForm::Bregman: {
                double c = shift_[i];
                double v = kernel_.conj(x + c);
                if (is_pos_inf(v)) return pos_inf;
                return v - kernel_.conj(c);
            }
        }
        return 0.0;
    }

    /// Derivative of the conjugate; the density kernel of the tilted family.
    double beta_star_prime(std::size_t i, double x) const {
        switch (form_) {
            case IntegrandForm::Autonomous:
                return sat_mul(base_[i], kernel_conjugate_deriv(kernel_, x));
            case IntegrandForm::Weighted:
                return sat_mul(base_[i], kernel_conjugate_deriv(kernel_, x / wfac_[i]));
            case IntegrandForm::Bregman:
                return kernel_conjugate_deriv(kernel_, x + shift_[i]);
        }
        return 0.0;
    }

    /// Supremum of slopes of beta(r_i, .): arguments of beta* must stay below.
    double beta_prime_inf(std::size_t i) const {
        switch (form_) {
            case IntegrandForm::Autonomous:
                return kernel_.f_prime_inf;
            case IntegrandForm::Weighted:
                return sat_mul(wfac_[i], kernel_.f_prime_inf);
            case IntegrandForm::Bregman:
                return sat_add(kernel_.f_prime_inf, -shift_[i]);
        }
        return pos_inf;
    }

    /// beta(r_i, 0); the cost of removing all mass from scenario i.
    double beta_zero(std::size_t i) const { return beta(i, 0.0); }

  private:
    IntegrandForm form_;
    ConvexKernel kernel_;
    std::vector<double> base_;   // baseline density per scenario
    std::vector<double> wfac_;   // weighted form: normalized weights
    std::vector<double> shift_;  // Bregman form: f'(q_i)
};

/**
 * @brief Build the integrand realizing the spec's divergence on the set.
 *
 * Relative entropy, power and plain f-divergences need every scenario to
 * carry positive baseline probability (densities relative to the baseline
 * must exist); Bregman integrands allow zero-probability scenarios exactly
 * when f'(0+) is finite.
 */
inline Integrand make_integrand(const DivergenceSpec& spec, const ScenarioSet& set) {
    std::vector<double> base(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) base[i] = set.baseline_density(i);

    auto require_positive_base = [&]() {
        for (std::size_t i = 0; i < set.size(); ++i)
            if (!(base[i] > 0.0))
                throw std::invalid_argument(
                    "integrand: scenario '" + set[i].id +
                    "' has zero baseline probability, unsupported for this divergence");
    };

    switch (spec.kind) {
        case DivergenceKind::RelativeEntropy:
            require_positive_base();
            return Integrand(IntegrandForm::Autonomous, power_kernel(1.0), std::move(base), {});
        case DivergenceKind::PowerDivergence:
            require_positive_base();
            return Integrand(IntegrandForm::Autonomous, power_kernel(spec.alpha), std::move(base),
                             {});
        case DivergenceKind::FDivergence:
            require_positive_base();
            return Integrand(IntegrandForm::Autonomous, spec.kernel, std::move(base), {});
        case DivergenceKind::WeightedFDivergence: {
            require_positive_base();
            return Integrand(IntegrandForm::Weighted, spec.kernel, std::move(base),
                             normalized_weights(spec, set));
        }
        case DivergenceKind::Bregman: {
            for (std::size_t i = 0; i < set.size(); ++i)
                if (!(base[i] > 0.0) && !is_finite(spec.kernel.f_prime_zero))
                    throw std::invalid_argument("integrand: scenario '" + set[i].id +
                                                "' has zero baseline probability and the kernel "
                                                "slope at 0 is infinite");
            return Integrand(IntegrandForm::Bregman, spec.kernel, std::move(base), {});
        }
    }
    throw std::logic_error("make_integrand: unknown kind");
}

}  // namespace divrisk
