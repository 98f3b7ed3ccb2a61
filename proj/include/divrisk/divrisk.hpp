#pragma once

// Worst-case expected payoff over divergence balls around a baseline
// distribution: scenario model, convex kernels and integrands, closed-form
// entropy-ball solver, general tangent solver, penalized preferences,
// brute-force oracles and JSON reports.

#include "divrisk/divergence.hpp"
#include "divrisk/divergence_spec.hpp"
#include "divrisk/entropy_solver.hpp"
#include "divrisk/extended_real.hpp"
#include "divrisk/general_solver.hpp"
#include "divrisk/integrand.hpp"
#include "divrisk/kernel.hpp"
#include "divrisk/logmgf.hpp"
#include "divrisk/numeric.hpp"
#include "divrisk/options.hpp"
#include "divrisk/oracle.hpp"
#include "divrisk/preferences.hpp"
#include "divrisk/report_json.hpp"
#include "divrisk/scenario.hpp"
