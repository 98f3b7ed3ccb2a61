#pragma once

#include <cmath>
#include <limits>

namespace divrisk {

/// Extended-real arithmetic helpers.  IEEE infinities are used as markers for
/// unbounded values; the conventions below keep integrals and suprema well
/// defined without special-casing at every call site.

inline constexpr double pos_inf = std::numeric_limits<double>::infinity();
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_pos_inf(double x) { return std::isinf(x) && x > 0; }
inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0; }

/// Sum with absorbing infinities.  Opposite infinities must not meet here;
/// callers arrange operands so that never happens.
inline double sat_add(double a, double b) {
    if (is_pos_inf(a) || is_pos_inf(b)) return pos_inf;
    if (is_neg_inf(a) || is_neg_inf(b)) return neg_inf;
    return a + b;
}

/// Product with the measure-theoretic convention 0 * inf = 0.
inline double sat_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

}  // namespace divrisk
