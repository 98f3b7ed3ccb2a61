#pragma once

namespace divrisk {

/// Tolerances and iteration caps shared by the solvers.  `scaled_by` applies
/// a global factor, used by the command line --tol option.
struct SolverOptions {
    double root_tol = 1e-12;       // |g(theta) - k| type residuals
    double conjugate_tol = 1e-10;  // residuals of conjugate-side bisection
    double newton_tol = 1e-11;     // gradient-norm target of the two-variable solve
    int max_iter = 200;

    SolverOptions scaled_by(double factor) const {
        SolverOptions o = *this;
        o.root_tol *= factor;
        o.conjugate_tol *= factor;
        o.newton_tol *= factor;
        return o;
    }
};

}  // namespace divrisk
