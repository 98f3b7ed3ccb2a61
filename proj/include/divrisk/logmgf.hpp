#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "divrisk/extended_real.hpp"
#include "divrisk/numeric.hpp"
#include "divrisk/scenario.hpp"

namespace divrisk {

/**
 * @brief Cumulant generating function of the payoff under the baseline:
 * Lambda(theta) = log E exp(theta X), with its derivative and the boundary
 * data the closed-form solver dispatches on.
 *
 * theta_min is the infimum of the effective domain (-inf when the domain is
 * the whole line).  Backends over an explicit scenario set also expose the
 * smallest payoff carrying positive probability and its mass.
 */
class LogMGFBackend {
  public:
    virtual ~LogMGFBackend() = default;

    virtual double lambda(double theta) const = 0;        // +inf outside the domain
    virtual double lambda_prime(double theta) const = 0;  // tilted mean where finite
    virtual double theta_min() const = 0;
    /// Lambda and Lambda' finite at a finite theta_min.
    virtual bool finite_at_theta_min() const { return false; }

    virtual bool has_ess_inf() const { return false; }
    virtual double ess_inf() const { return neg_inf; }
    virtual double argmin_mass() const { return 0.0; }

    virtual std::string tag() const = 0;
    virtual const ScenarioSet* scenario_set() const { return nullptr; }

    double b0() const { return lambda_prime(0.0); }
};

/// Backend over an explicit scenario set.  Only scenarios with positive
/// baseline probability enter; the essential bounds are over that support.
class DiscreteLogMGF final : public LogMGFBackend {
  public:
    explicit DiscreteLogMGF(ScenarioSet set) : set_(std::move(set)) {
        if (set_.degenerate())
            throw std::invalid_argument("log-mgf backend: degenerate scenario set refused");
        for (std::size_t i = 0; i < set_.size(); ++i)
            if (set_.base_prob(i) > 0.0) support_.push_back(i);
        if (support_.empty())
            throw std::invalid_argument("log-mgf backend: no scenario has positive probability");
        ess_inf_ = set_.payoff(support_.front());
        for (std::size_t i : support_) ess_inf_ = std::min(ess_inf_, set_.payoff(i));
        for (std::size_t i : support_)
            if (payoffs_equal(set_.payoff(i), ess_inf_)) argmin_mass_ += set_.base_prob(i);
    }

    double lambda(double theta) const override {
        std::vector<double> a(support_.size()), w(support_.size());
        for (std::size_t j = 0; j < support_.size(); ++j) {
            a[j] = theta * set_.payoff(support_[j]);
            w[j] = set_.base_prob(support_[j]);
        }
        return log_sum_exp(a, w);
    }

    double lambda_prime(double theta) const override {
        // Tilted mean, computed from max-shifted weights for stability.
        double shift = neg_inf;
        for (std::size_t i : support_) shift = std::max(shift, theta * set_.payoff(i));
        double num = 0.0, den = 0.0;
        for (std::size_t i : support_) {
            double e = set_.base_prob(i) * std::exp(theta * set_.payoff(i) - shift);
            num += set_.payoff(i) * e;
            den += e;
        }
        return num / den;
    }

    double theta_min() const override { return neg_inf; }
    bool has_ess_inf() const override { return true; }
    double ess_inf() const override { return ess_inf_; }
    double argmin_mass() const override { return argmin_mass_; }
    std::string tag() const override { return "discrete"; }
    const ScenarioSet* scenario_set() const override { return &set_; }

  private:
    ScenarioSet set_;
    std::vector<std::size_t> support_;
    double ess_inf_ = 0.0;
    double argmin_mass_ = 0.0;
};

/// Closed-form backend supplied as a pair of callables plus boundary data.
class AnalyticLogMGF final : public LogMGFBackend {
  public:
    struct Config {
        std::string name;
        std::function<double(double)> lambda;
        std::function<double(double)> lambda_prime;
        double theta_min = neg_inf;
        bool finite_at_theta_min = false;
        bool has_ess_inf = false;
        double ess_inf = neg_inf;
        double argmin_mass = 0.0;
    };

    explicit AnalyticLogMGF(Config cfg) : cfg_(std::move(cfg)) {
        if (!cfg_.lambda || !cfg_.lambda_prime)
            throw std::invalid_argument("analytic log-mgf: lambda and lambda_prime required");
        validate();
    }

    double lambda(double theta) const override {
        if (theta < cfg_.theta_min) return pos_inf;
        if (theta == cfg_.theta_min && !cfg_.finite_at_theta_min && is_finite(theta))
            return pos_inf;
        return cfg_.lambda(theta);
    }

    double lambda_prime(double theta) const override { return cfg_.lambda_prime(theta); }
    double theta_min() const override { return cfg_.theta_min; }
    bool finite_at_theta_min() const override { return cfg_.finite_at_theta_min; }
    bool has_ess_inf() const override { return cfg_.has_ess_inf; }
    double ess_inf() const override { return cfg_.ess_inf; }
    double argmin_mass() const override { return cfg_.argmin_mass; }
    std::string tag() const override { return cfg_.name; }

  private:
    void validate() const {
        if (std::abs(lambda(0.0)) > 1e-10)
            throw std::invalid_argument("analytic log-mgf '" + cfg_.name + "': Lambda(0) != 0");
        // Convexity and derivative consistency on a sample grid inside the domain.
        double lo = is_finite(cfg_.theta_min) ? cfg_.theta_min + 1e-6 : -3.0;
        for (int i = 0; i + 2 <= 16; ++i) {
            double t1 = lo + (1.5 - lo) * i / 16.0;
            double t2 = lo + (1.5 - lo) * (i + 2) / 16.0;
            double mid = 0.5 * (t1 + t2);
            if (lambda(mid) > 0.5 * lambda(t1) + 0.5 * lambda(t2) + 1e-9)
                throw std::invalid_argument("analytic log-mgf '" + cfg_.name +
                                            "': Lambda fails midpoint convexity");
            if (lambda_prime(t1) > lambda_prime(t2) + 1e-9)
                throw std::invalid_argument("analytic log-mgf '" + cfg_.name +
                                            "': Lambda' is not nondecreasing");
            double h = 1e-6 * std::max(1.0, std::abs(mid));
            double fd = (lambda(mid + h) - lambda(mid - h)) / (2.0 * h);
            if (std::abs(fd - lambda_prime(mid)) > 1e-4 * std::max(1.0, std::abs(fd)))
                throw std::invalid_argument("analytic log-mgf '" + cfg_.name +
                                            "': Lambda' disagrees with finite differences");
        }
    }

    Config cfg_;
};

/// Lambda(theta) = b theta + sigma^2 theta^2 / 2; worst value b - sigma sqrt(2k).
inline std::shared_ptr<LogMGFBackend> make_gaussian_backend(double mean, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian backend: sigma must be > 0");
    AnalyticLogMGF::Config cfg;
    {
        std::ostringstream name;
        name << "gaussian:" << mean << ":" << sigma;
        cfg.name = name.str();
    }
    cfg.lambda = [mean, sigma](double t) { return mean * t + 0.5 * sigma * sigma * t * t; };
    cfg.lambda_prime = [mean, sigma](double t) { return mean + sigma * sigma * t; };
    return std::make_shared<AnalyticLogMGF>(std::move(cfg));
}

/// Lambda(theta) = theta + (1 + theta)^{3/2} - 1 on [-1, inf): the domain has
/// a finite lower endpoint with finite Lambda(-1) = -2 and Lambda'(-1) = 1,
/// so large balls hit the boundary instead of a tangent point.
inline std::shared_ptr<LogMGFBackend> make_power32_backend() {
    AnalyticLogMGF::Config cfg;
    cfg.name = "power32";
    cfg.lambda = [](double t) {
        return t < -1.0 ? pos_inf : t + std::pow(1.0 + t, 1.5) - 1.0;
    };
    cfg.lambda_prime = [](double t) { return 1.0 + 1.5 * std::sqrt(std::max(0.0, 1.0 + t)); };
    cfg.theta_min = -1.0;
    cfg.finite_at_theta_min = true;
    return std::make_shared<AnalyticLogMGF>(std::move(cfg));
}

/// Lambda(theta) = theta + theta^2 on [0, inf), +inf for theta < 0: the
/// payoff is unbounded below with no exponential moments on that side, so the
/// worst value is -inf for every positive radius.
inline std::shared_ptr<LogMGFBackend> make_heavytail_backend() {
    AnalyticLogMGF::Config cfg;
    cfg.name = "heavytail";
    cfg.lambda = [](double t) { return t < 0.0 ? pos_inf : t + t * t; };
    cfg.lambda_prime = [](double t) { return 1.0 + 2.0 * std::max(0.0, t); };
    cfg.theta_min = 0.0;
    cfg.finite_at_theta_min = true;
    return std::make_shared<AnalyticLogMGF>(std::move(cfg));
}

/// Parse "gaussian:<mean>:<sigma>", "power32" or "heavytail".
inline std::shared_ptr<LogMGFBackend> make_analytic_backend(const std::string& preset) {
    if (preset == "power32") return make_power32_backend();
    if (preset == "heavytail") return make_heavytail_backend();
    if (preset.rfind("gaussian:", 0) == 0) {
        std::string rest = preset.substr(9);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("analytic preset: expected gaussian:<mean>:<sigma>");
        double mean = 0.0, sigma = 0.0;
        try {
            mean = std::stod(rest.substr(0, colon));
            sigma = std::stod(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("analytic preset: cannot parse gaussian parameters");
        }
        return make_gaussian_backend(mean, sigma);
    }
    throw std::invalid_argument("unknown analytic preset '" + preset +
                                "' (expected gaussian:<mean>:<sigma>, power32 or heavytail)");
}

}  // namespace divrisk
