#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "divrisk/divergence.hpp"
#include "divrisk/divergence_spec.hpp"
#include "divrisk/scenario.hpp"

using namespace divrisk;
using Catch::Approx;

namespace {

ScenarioSet unit_pair() {
    return ScenarioSet::make({{"a", 0.0, 0.5}, {"b", 1.0, 0.5}});
}

DensityVector dv(std::vector<double> v) {
    DensityVector d;
    d.values = std::move(v);
    return d;
}

}  // namespace

TEST_CASE("density bookkeeping") {
    ScenarioSet s = unit_pair();
    DensityVector p = dv({0.3, 0.7});
    REQUIRE(density_mass(p, s) == Approx(1.0));
    REQUIRE(is_normalized(p, s));
    REQUIRE(density_mean(p, s) == Approx(0.7));
    DensityVector p0 = baseline_density(s);
    REQUIRE(p0[0] == Approx(0.5));
    REQUIRE(density_mean(p0, s) == Approx(s.b0()));
    REQUIRE_THROWS_AS(validate_density(dv({0.3}), s), std::invalid_argument);
    REQUIRE_THROWS_AS(validate_density(dv({-0.1, 1.1}), s), std::invalid_argument);
}

TEST_CASE("relative entropy on a known pair") {
    ScenarioSet s = unit_pair();
    double d = relative_entropy(dv({0.3, 0.7}), baseline_density(s), s);
    REQUIRE(d == Approx(0.0822828785050518464).epsilon(1e-14));
    REQUIRE(relative_entropy(baseline_density(s), baseline_density(s), s) == Approx(0.0).margin(1e-15));
}

TEST_CASE("relative entropy handles zero mass cleanly") {
    ScenarioSet s = unit_pair();
    // All mass on one point: D = log 2.
    REQUIRE(relative_entropy(dv({0.0, 1.0}), baseline_density(s), s) ==
            Approx(std::log(2.0)).epsilon(1e-14));
    // Mass on a point the reference excludes: infinite.
    ScenarioSet t = ScenarioSet::make({{"a", 0.0, 1.0}, {"b", 1.0, 0.0}});
    REQUIRE(is_pos_inf(relative_entropy(dv({0.5, 0.5}), baseline_density(t), t)));
    REQUIRE(relative_entropy(dv({1.0, 0.0}), baseline_density(t), t) == Approx(0.0).margin(1e-15));
}

TEST_CASE("relative entropy is invariant under the reference weighting") {
    // Same two distributions expressed against a different reference measure.
    ScenarioSet s = ScenarioSet::make({{"a", 0.0, 0.5, 2.0}, {"b", 1.0, 0.5, 1.0}});
    REQUIRE(s.baseline_density(0) == Approx(0.25));
    // Masses (0.3, 0.7) correspond to density values (0.15, 0.7).
    DensityVector p = dv({0.15, 0.7});
    REQUIRE(density_mass(p, s) == Approx(1.0));
    REQUIRE(relative_entropy(p, baseline_density(s), s) ==
            Approx(0.0822828785050518464).epsilon(1e-13));
}

TEST_CASE("f divergence with the entropy kernel matches relative entropy") {
    ScenarioSet s = ScenarioSet::make({{"d", -1.0, 0.2}, {"f", 0.0, 0.5}, {"u", 2.0, 0.3}});
    ConvexKernel ent = power_kernel(1.0);
    for (auto& masses : {std::vector<double>{0.1, 0.5, 0.4}, {0.0, 0.5, 0.5}, {1.0, 0.0, 0.0}}) {
        DensityVector p = dv(masses);
        REQUIRE(f_divergence(p, baseline_density(s), s, ent) ==
                Approx(relative_entropy(p, baseline_density(s), s)).margin(1e-13));
    }
}

TEST_CASE("chi square type divergence") {
    ScenarioSet s = unit_pair();
    // f_2 gives half the chi-square: sum (p - q)^2 / (2 q).
    double d = f_divergence(dv({0.3, 0.7}), baseline_density(s), s, power_kernel(2.0));
    REQUIRE(d == Approx(0.08).epsilon(1e-13));
    // Non-cofinite kernel keeps mass on excluded points finite in cost.
    ScenarioSet t = ScenarioSet::make({{"a", 0.0, 1.0}, {"b", 1.0, 0.0}});
    double d05 = f_divergence(dv({0.5, 0.5}), baseline_density(t), t, power_kernel(0.5));
    REQUIRE(is_finite(d05));  // f'(inf) = 2 caps the singular part
    double d2 = f_divergence(dv({0.5, 0.5}), baseline_density(t), t, power_kernel(2.0));
    REQUIRE(is_pos_inf(d2));  // cofinite kernel forbids it
}

TEST_CASE("Bregman distance with the quadratic kernel") {
    ScenarioSet s = unit_pair();
    double d = bregman_distance(dv({0.3, 0.7}), baseline_density(s), s, quadratic_kernel());
    REQUIRE(d == Approx(0.08).epsilon(1e-13));  // sum (p - q)^2
    REQUIRE(bregman_distance(baseline_density(s), baseline_density(s), s, quadratic_kernel()) ==
            0.0);
}

TEST_CASE("divergence spec dispatch is consistent") {
    ScenarioSet s = ScenarioSet::make({{"d", -1.0, 0.2}, {"f", 0.0, 0.5}, {"u", 2.0, 0.3}});
    DensityVector p = dv({0.1, 0.55, 0.35});

    double re = divergence_eval(DivergenceSpec::relative_entropy(), p, s);
    REQUIRE(re == Approx(divergence_eval(DivergenceSpec::power(1.0), p, s)).margin(1e-14));

    double flat = divergence_eval(DivergenceSpec::power(2.0), p, s);
    DivergenceSpec w = DivergenceSpec::weighted(power_kernel(2.0), {1.0, 1.0, 1.0});
    REQUIRE(divergence_eval(w, p, s) == Approx(flat).margin(1e-14));

    DivergenceSpec breg = DivergenceSpec::bregman(quadratic_kernel());
    double expect = 0.0;
    DensityVector p0 = baseline_density(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        double diff = p[i] - p0[i];
        expect += diff * diff;
    }
    REQUIRE(divergence_eval(breg, p, s) == Approx(expect).margin(1e-14));
}

TEST_CASE("weighted divergence rescales to unit baseline expectation") {
    ScenarioSet s = unit_pair();
    // Raw weights (1, 3) have baseline mean 2, so effective weights are (0.5, 1.5).
    DivergenceSpec w = DivergenceSpec::weighted(power_kernel(2.0), {1.0, 3.0});
    DensityVector p = dv({0.3, 0.7});
    double expect = 0.5 * 0.04 / (2 * 0.5) * 1.0 + 1.5 * 0.04 / (2 * 0.5) * 1.0;
    REQUIRE(divergence_eval(w, p, s) == Approx(expect).epsilon(1e-12));
    // Scaling all weights together changes nothing.
    DivergenceSpec w2 = DivergenceSpec::weighted(power_kernel(2.0), {10.0, 30.0});
    REQUIRE(divergence_eval(w2, p, s) == Approx(divergence_eval(w, p, s)).margin(1e-14));
}

TEST_CASE("spec construction guards") {
    REQUIRE_THROWS_AS(DivergenceSpec::f_div(quadratic_kernel()), std::invalid_argument);
    REQUIRE_THROWS_AS(DivergenceSpec::weighted(power_kernel(2.0), {1.0, 0.0}),
                      std::invalid_argument);
    REQUIRE_NOTHROW(DivergenceSpec::bregman(itakura_saito_kernel()));
    REQUIRE_NOTHROW(DivergenceSpec::f_div(power_kernel(0.5)));
    ScenarioSet s = unit_pair();
    DivergenceSpec w = DivergenceSpec::weighted(power_kernel(2.0), {1.0, 1.0, 1.0});
    REQUIRE_THROWS_AS(divergence_eval(w, baseline_density(s), s), std::invalid_argument);
}
