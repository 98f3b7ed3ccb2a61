// Acceptance gate: twelve numbered checks covering oracle agreement, closed
// forms, case classification, the two solve paths, gradients, identities,
// frontier shape and the penalized/constrained bridge.  Each check prints one
// PASS or FAIL line; the exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "divrisk/divrisk.hpp"

using namespace divrisk;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%2d] %-52s %s%s%s\n", idx, name, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!ok) ++g_failures;
}

ScenarioSet coin_set() {
    return ScenarioSet::make({{"a", 0.0, 0.5}, {"b", 1.0, 0.5}});
}

ScenarioSet triple_set() {
    return ScenarioSet::make({{"d", -1.0, 0.2}, {"m", 0.0, 0.5}, {"u", 2.0, 0.3}});
}

/// Random 3-scenario set: payoffs in [-2, 2] separated by at least 0.05,
/// probabilities bounded away from zero.
ScenarioSet random_triple(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pay(-2.0, 2.0);
    std::uniform_real_distribution<double> raw(0.05, 1.0);
    for (;;) {
        double x[3] = {pay(rng), pay(rng), pay(rng)};
        std::sort(x, x + 3);
        if (x[1] - x[0] < 0.05 || x[2] - x[1] < 0.05) continue;
        double g[3] = {raw(rng), raw(rng), raw(rng)};
        double sum = g[0] + g[1] + g[2];
        double p0 = 0.05 + 0.85 * g[0] / sum;
        double p1 = 0.05 + 0.85 * g[1] / sum;
        double p2 = 1.0 - p0 - p1;
        return ScenarioSet::make({{"a", x[0], p0}, {"b", x[1], p1}, {"c", x[2], p2}});
    }
}

struct NamedSpec {
    std::string name;
    DivergenceSpec spec;
};

std::vector<NamedSpec> four_specs() {
    return {{"re", DivergenceSpec::relative_entropy()},
            {"power:2", DivergenceSpec::power(2.0)},
            {"power:0.5", DivergenceSpec::power(0.5)},
            {"bregman:square", DivergenceSpec::bregman(quadratic_kernel())}};
}

/// Worst value, cap and report through the library's natural routing.
struct SolveOut {
    double value = 0.0;
    double k_max = 0.0;
    bool attained = false;
    bool tangent = false;  // generic tangent solution with a worst density
    DensityVector density;
    double theta2 = 0.0;
};

SolveOut solve_routed(const ScenarioSet& set, const NamedSpec& ns, double k) {
    SolveOut out;
    if (ns.spec.is_entropy_ball()) {
        DiscreteLogMGF backend(set);
        EntropySolveReport rep = solve_vk(backend, k);
        out.value = rep.value;
        out.k_max = rep.k_max;
        out.attained = rep.attained;
        out.tangent = rep.case_tag == EntropyCase::Generic;
        if (rep.worst_density) out.density = *rep.worst_density;
        if (rep.theta_bar) out.theta2 = *rep.theta_bar;
        return out;
    }
    GeneralProblem pr(set, make_integrand(ns.spec, set));
    GeneralSolveReport rep = solve(pr, k);
    out.value = rep.value;
    out.k_max = rep.k_max;
    out.attained = rep.attained;
    out.tangent =
        rep.case_tag == GeneralCase::NewtonPath || rep.case_tag == GeneralCase::ConjugatePath;
    if (rep.worst_density) out.density = *rep.worst_density;
    if (rep.theta_bar) out.theta2 = rep.theta_bar->t2;
    return out;
}

double ball_cap(const ScenarioSet& set, const NamedSpec& ns) {
    if (ns.spec.is_entropy_ball()) return re_kmax(DiscreteLogMGF(set));
    GeneralProblem pr(set, make_integrand(ns.spec, set));
    return kmax_general(pr);
}

void crit_oracle_equivalence() {
    bool ok = true;
    std::string note;
    auto t0 = std::chrono::steady_clock::now();
    try {
        std::mt19937_64 rng(20260819);
        auto specs = four_specs();
        for (int s = 0; s < 50 && ok; ++s) {
            ScenarioSet set = random_triple(rng);
            for (const NamedSpec& ns : specs) {
                double kmax = ball_cap(set, ns);
                for (double ratio : {0.25, 0.5, 0.9}) {
                    double k = ratio * kmax;
                    SolveOut so = solve_routed(set, ns, k);
                    auto cost = [&](const DensityVector& p) {
                        return divergence_eval(ns.spec, p, set);
                    };
                    oracle::OracleResult orr = oracle::simplex_min_constrained(set, cost, k);
                    double diff = std::abs(so.value - orr.value);
                    if (!(diff <= 1e-3 + orr.error_bound)) {
                        ok = false;
                        note = "set " + std::to_string(s) + " " + ns.name + " ratio " +
                               std::to_string(ratio) + " diff " + std::to_string(diff);
                        break;
                    }
                }
                if (!ok) break;
            }
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && secs >= 60.0) {
            ok = false;
            note = "runtime " + std::to_string(secs) + "s";
        } else if (ok) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "600 solves, %.1fs", secs);
            note = buf;
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(1, "oracle equivalence, 4 balls x 3 radii x 50 sets", ok, note);
}

void crit_multiplier_closed_form() {
    bool ok = true;
    std::string note;
    try {
        std::mt19937_64 rng(20260819 + 2);
        for (int s = 0; s < 20 && ok; ++s) {
            ScenarioSet set = random_triple(rng);
            GeneralProblem pr(set, make_integrand(DivergenceSpec::relative_entropy(), set));
            DiscreteLogMGF backend(set);
            for (double lambda : {0.5, 1.0, 5.0}) {
                double closed = -lambda * backend.lambda(-1.0 / lambda);
                PreferenceReport rep = evaluate_w(pr, lambda);
                double diff = std::abs(rep.w_value - closed);
                if (!(diff <= 1e-10)) {
                    ok = false;
                    note = "set " + std::to_string(s) + " lambda " + std::to_string(lambda) +
                           " diff " + std::to_string(diff);
                    break;
                }
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(2, "penalized value matches the closed form, 1e-10", ok, note);
}

void crit_essinf_fixture() {
    bool ok = true;
    std::string note;
    try {
        ScenarioSet set = ScenarioSet::make({{"lo", 0.0, 0.25}, {"hi", 1.0, 0.75}});
        DiscreteLogMGF backend(set);
        double k = -std::log(0.25);  // exactly the cap
        EntropySolveReport rep = solve_vk(backend, k);
        ok = rep.case_tag == EntropyCase::Prop1EssInf && rep.value == 0.0 && rep.attained &&
             rep.worst_density.has_value() && (*rep.worst_density)[0] == 1.0 &&
             (*rep.worst_density)[1] == 0.0;
        if (!ok) note = std::string("case ") + case_tag(rep.case_tag) + " value " +
                        std::to_string(rep.value);
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(3, "saturated ball hits the worst payoff exactly", ok, note);
}

void crit_boundary_fixture() {
    bool ok = true;
    std::string note;
    try {
        auto backend = make_power32_backend();
        EntropySolveReport rep = solve_vk(*backend, 1.5);
        double diff = std::abs(rep.value - 0.5);
        ok = rep.case_tag == EntropyCase::Prop3Boundary && diff <= 1e-10 && !rep.attained;
        if (!ok) note = std::string("case ") + case_tag(rep.case_tag) + " diff " +
                        std::to_string(diff);
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(4, "finite-boundary cumulant interpolates, 1e-10", ok, note);
}

void crit_unbounded_fixture() {
    bool ok = true;
    std::string note;
    try {
        auto backend = make_heavytail_backend();
        for (double k : {0.01, 1.0, 100.0}) {
            EntropySolveReport rep = solve_vk(*backend, k);
            if (rep.case_tag != EntropyCase::Prop2Unbounded || !is_neg_inf(rep.value) ||
                rep.attained) {
                ok = false;
                note = "k " + std::to_string(k) + " case " + case_tag(rep.case_tag);
                break;
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(5, "missing moments give an unbounded worst case", ok, note);
}

void crit_two_paths() {
    bool ok = true;
    std::string note;
    try {
        // Entropy side: tangent solve vs conjugate-side bisection.
        struct EntropyFixture {
            std::shared_ptr<LogMGFBackend> backend;
            std::vector<double> ks;
        };
        std::vector<EntropyFixture> efs;
        efs.push_back({std::make_shared<DiscreteLogMGF>(coin_set()), {0.02, 0.1, 0.3}});
        efs.push_back({std::make_shared<DiscreteLogMGF>(triple_set()), {0.05, 0.3, 1.0}});
        efs.push_back({make_gaussian_backend(1.0, 2.0), {0.1, 1.0}});
        efs.push_back({make_power32_backend(), {0.5}});
        for (const auto& ef : efs) {
            for (double k : ef.ks) {
                EntropySolveReport a = solve_vk(*ef.backend, k);
                ConjugateSolveResult b = solve_via_conjugate(*ef.backend, k);
                double diff = std::abs(a.value - b.value);
                if (!(diff <= 1e-8)) {
                    ok = false;
                    note = "entropy k " + std::to_string(k) + " diff " + std::to_string(diff);
                }
            }
        }
        // General side: damped Newton vs conjugate-side bisection.
        if (ok) {
            auto specs = four_specs();
            for (const ScenarioSet& set : {coin_set(), triple_set()}) {
                for (const NamedSpec& ns : specs) {
                    GeneralProblem pr(set, make_integrand(ns.spec, set));
                    for (double k : {0.05, 0.1}) {
                        GeneralSolveReport a = solve_newton(pr, k);
                        GeneralSolveReport b = solve_conjugate(pr, k);
                        double diff = std::abs(a.value - b.value);
                        if (!(diff <= 1e-7)) {
                            ok = false;
                            note = ns.name + " k " + std::to_string(k) + " diff " +
                                   std::to_string(diff);
                        }
                    }
                }
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(6, "tangent and conjugate paths agree, 1e-8 / 1e-7", ok, note);
}

void crit_constraint_activity() {
    bool ok = true;
    std::string note;
    try {
        std::mt19937_64 rng(20260819 + 7);
        auto specs = four_specs();
        int checked = 0;
        for (int s = 0; s < 20 && ok; ++s) {
            ScenarioSet set = random_triple(rng);
            for (const NamedSpec& ns : specs) {
                double kmax = ball_cap(set, ns);
                for (double ratio : {0.25, 0.7}) {
                    double k = ratio * kmax;
                    SolveOut so = solve_routed(set, ns, k);
                    if (!so.tangent || !so.attained) continue;
                    double d = divergence_eval(ns.spec, so.density, set);
                    ++checked;
                    if (!(std::abs(d - k) <= 1e-7)) {
                        ok = false;
                        note = ns.name + " |cost-k| " + std::to_string(std::abs(d - k));
                        break;
                    }
                }
                if (!ok) break;
            }
        }
        if (ok && checked < 100) {
            ok = false;
            note = "only " + std::to_string(checked) + " tangent solves checked";
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(7, "worst density sits on the ball boundary, 1e-7", ok, note);
}

void crit_gradient_checks() {
    bool ok = true;
    std::string note;
    try {
        std::mt19937_64 rng(20260819 + 8);
        std::uniform_real_distribution<double> u1(-1.0, 1.0);
        std::uniform_real_distribution<double> u2(-1.2, 0.5);
        ScenarioSet set = triple_set();
        auto specs = four_specs();
        for (const NamedSpec& ns : specs) {
            GeneralProblem pr(set, make_integrand(ns.spec, set));
            auto valid = [&](Theta th) {
                if (!in_theta_domain(pr, th, 1e-3)) return false;
                for (std::size_t i = 0; i < set.size(); ++i) {
                    double x = th.t1 + th.t2 * set.payoff(i);
                    if (ns.name == "power:2" && std::abs(x + 1.0) < 2e-3) return false;
                    if (ns.name == "bregman:square" &&
                        std::abs(x + 2.0 * set.base_prob(i)) < 2e-3)
                        return false;
                }
                return true;
            };
            int done = 0, draws = 0;
            while (done < 100 && draws < 100000 && ok) {
                ++draws;
                Theta th{u1(rng), u2(rng)};
                if (!valid(th)) continue;
                ++done;
                KGrad an = k_grad(pr, th);
                double h1 = 1e-5 * std::max(1.0, std::abs(th.t1));
                double h2 = 1e-5 * std::max(1.0, std::abs(th.t2));
                double fd1 = (k_eval(pr, {th.t1 + h1, th.t2}) - k_eval(pr, {th.t1 - h1, th.t2})) /
                             (2.0 * h1);
                double fd2 = (k_eval(pr, {th.t1, th.t2 + h2}) - k_eval(pr, {th.t1, th.t2 - h2})) /
                             (2.0 * h2);
                double e1 = std::abs(fd1 - an.mass) / std::max(1.0, std::abs(an.mass));
                double e2 = std::abs(fd2 - an.xmass) / std::max(1.0, std::abs(an.xmass));
                if (e1 > 1e-6 || e2 > 1e-6) {
                    ok = false;
                    note = ns.name + " grad err " + std::to_string(std::max(e1, e2));
                }
            }
            if (ok && done < 100) {
                ok = false;
                note = ns.name + ": only " + std::to_string(done) + " valid points";
            }
            if (!ok) break;
        }
        // Cumulant derivative against central differences.
        if (ok) {
            std::uniform_real_distribution<double> ut(-20.0, 3.0);
            for (int i = 0; i < 100 && ok; ++i) {
                ScenarioSet s = random_triple(rng);
                DiscreteLogMGF b(s);
                double t = ut(rng);
                double h = 1e-5 * std::max(1.0, std::abs(t));
                double fd = (b.lambda(t + h) - b.lambda(t - h)) / (2.0 * h);
                double an = b.lambda_prime(t);
                double e = std::abs(fd - an) / std::max(1.0, std::abs(an));
                if (e > 1e-6) {
                    ok = false;
                    note = "cumulant slope err " + std::to_string(e);
                }
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(8, "gradients match central differences, 1e-6", ok, note);
}

void crit_tangent_identity() {
    bool ok = true;
    std::string note;
    try {
        std::mt19937_64 rng(20260819 + 9);
        auto check = [&](const LogMGFBackend& backend, double k) {
            EntropySolveReport rep = solve_vk(backend, k);
            if (rep.case_tag != EntropyCase::Generic || !rep.theta_bar) return;
            double lhs = backend.lambda(*rep.theta_bar);
            double rhs = *rep.theta_bar * rep.value - k;
            if (!(std::abs(lhs - rhs) <= 1e-9)) {
                ok = false;
                note = "k " + std::to_string(k) + " gap " + std::to_string(std::abs(lhs - rhs));
            }
        };
        DiscreteLogMGF a(coin_set());
        DiscreteLogMGF b(triple_set());
        for (double k : {0.02, 0.1, 0.3}) check(a, k);
        for (double k : {0.05, 0.3, 1.0}) check(b, k);
        for (int s = 0; s < 20 && ok; ++s) {
            ScenarioSet set = random_triple(rng);
            DiscreteLogMGF backend(set);
            check(backend, 0.4 * re_kmax(backend));
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(9, "tangent identity on generic solves, 1e-9", ok, note);
}

void crit_frontier_shape() {
    bool ok = true;
    std::string note;
    try {
        for (const ScenarioSet& set : {coin_set(), triple_set()}) {
            DiscreteLogMGF backend(set);
            double kmax = re_kmax(backend);
            double m = set.min_payoff(), b0 = set.b0();

            EntropySolveReport at0 = solve_vk(backend, 0.0);
            if (at0.value != backend.b0() || std::abs(at0.value - b0) > 1e-14) {
                ok = false;
                note = "V(0) " + std::to_string(at0.value) + " vs b0 " + std::to_string(b0);
                break;
            }
            double prev = at0.value;
            double last = prev;
            for (int i = 1; i < 100; ++i) {
                double k = 0.999 * kmax * i / 99.0;
                EntropySolveReport rep = solve_vk(backend, k);
                if (!(rep.value <= prev + 1e-10)) {
                    ok = false;
                    note = "not nonincreasing at k " + std::to_string(k);
                    break;
                }
                prev = rep.value;
                last = rep.value;
            }
            if (!ok) break;
            if (!(last >= m - 1e-12 && last <= m + 0.05 * (b0 - m))) {
                ok = false;
                note = "V(0.999 kmax) " + std::to_string(last) + " min " + std::to_string(m);
                break;
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(10, "frontier endpoints and monotone decrease", ok, note);
}

void crit_re_reduction() {
    bool ok = true;
    std::string note;
    try {
        std::mt19937_64 rng(20260819 + 11);
        for (int s = 0; s < 20 && ok; ++s) {
            ScenarioSet set = random_triple(rng);
            DiscreteLogMGF backend(set);
            double k = 0.3 * re_kmax(backend);
            EntropySolveReport er = solve_vk(backend, k);
            GeneralProblem pr(set, make_integrand(DivergenceSpec::relative_entropy(), set));
            GeneralSolveReport gr = solve(pr, k);
            double dv = std::abs(er.value - gr.value);
            double dt = std::abs(*er.theta_bar - gr.theta_bar->t2);
            double dd = 0.0;
            for (std::size_t i = 0; i < set.size(); ++i)
                dd = std::max(dd,
                              std::abs((*er.worst_density)[i] - (*gr.worst_density)[i]));
            if (dv > 1e-8 || dt > 1e-8 || dd > 1e-8) {
                ok = false;
                note = "set " + std::to_string(s) + " dv " + std::to_string(dv) + " dt " +
                       std::to_string(dt) + " dd " + std::to_string(dd);
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(11, "general machinery reduces to the entropy solve, 1e-8", ok, note);
}

void crit_duality_bridge() {
    bool ok = true;
    std::string note;
    try {
        ScenarioSet set = triple_set();
        DiscreteLogMGF backend(set);
        double kmax = re_kmax(backend);
        std::vector<double> ks, vs, thetas;
        for (int i = 1; i <= 10; ++i) {
            double k = 0.9 * kmax * i / 10.0;
            EntropySolveReport rep = solve_vk(backend, k);
            ks.push_back(k);
            vs.push_back(rep.value);
            thetas.push_back(*rep.theta_bar);
        }
        for (int j = 0; j < 10 && ok; ++j) {
            double lambda = 0.2 * std::pow(100.0, j / 9.0);
            double w = multiplier_w(backend, lambda).w_value;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                if (!(w <= vs[i] + lambda * ks[i] + 1e-9)) {
                    ok = false;
                    note = "bound broken at lambda " + std::to_string(lambda) + " k " +
                           std::to_string(ks[i]);
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < ks.size() && ok; ++i) {
            double lam = -1.0 / thetas[i];
            double w = multiplier_w(backend, lam).w_value;
            double gap = std::abs(w - (vs[i] + lam * ks[i]));
            if (!(gap <= 1e-7)) {
                ok = false;
                note = "equality gap " + std::to_string(gap) + " at k " + std::to_string(ks[i]);
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        note = e.what();
    }
    report(12, "penalized value envelopes the frontier", ok, note);
}

}  // namespace

int main() {
    crit_oracle_equivalence();
    crit_multiplier_closed_form();
    crit_essinf_fixture();
    crit_boundary_fixture();
    crit_unbounded_fixture();
    crit_two_paths();
    crit_constraint_activity();
    crit_gradient_checks();
    crit_tangent_identity();
    crit_frontier_shape();
    crit_re_reduction();
    crit_duality_bridge();
    std::printf("%d of 12 checks failed\n", g_failures);
    return g_failures;
}
