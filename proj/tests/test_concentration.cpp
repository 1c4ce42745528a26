#include <doctest.h>

#include <cmath>

#include "opinion/concentration.hpp"
#include "opinion/ode_analysis.hpp"

using namespace opinion;

namespace {

SimConfig check_config(std::int64_t M = 100, std::int64_t T = 200) {
    SimConfig c;
    c.M = M;
    c.T = T;
    c.behavior = BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5);
    c.influence = InfluenceSpec(0.1, 0.9);
    c.delta0 = 0.5;
    c.schedule = Schedule::last_fraction(T, 0.4);
    return c;
}

}  // namespace

TEST_CASE("approximate solution fixed points") {
    SimConfig c = check_config();
    c.influence = InfluenceSpec(0.45, 0.45);  // fixed point 1/2
    CHECK(approx_solution(c) == doctest::Approx(0.5).epsilon(1e-14));
    SimConfig big = check_config(100000000, 200);
    CHECK(approx_solution(big) == doctest::Approx(big.delta0).epsilon(1e-4));
}

TEST_CASE("approximate solution converges to the exponential closed form in M") {
    double gaps[2];
    const std::int64_t Ms[2] = {1000, 4000};
    for (int i = 0; i < 2; ++i) {
        SimConfig c = check_config(Ms[i], Ms[i]);
        gaps[i] = std::abs(approx_solution(c) - closed_form_final_pq_equal(c, Strategy::Last));
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[0] < 1e-3);
}

TEST_CASE("approximate solution validates its preconditions") {
    SimConfig c = check_config();
    c.behavior = BehaviorSpec::hybrid_sc(0.5, 0.6, 0.5);
    CHECK_THROWS_AS(approx_solution(c), ModelMismatch);
    c = check_config();
    c.schedule = Schedule::first_fraction(c.T, 0.4);
    CHECK_THROWS_AS(approx_solution(c), ConfigMismatch);
}

TEST_CASE("golden tail bounds for the reference configuration") {
    // combined deviation 0.1 with equal epsilons, independently re-derived
    const SimConfig c = check_config();
    const double rt = 0.99, r = 0.995;
    const double T = 200.0, b = 0.4;
    const double eps = 0.1 / (std::pow(rt, T) + std::pow(r, (1.0 - b) * T));
    CHECK(eps == doctest::Approx(0.146634884751389).epsilon(1e-12));
    const AzumaBounds bounds = azuma_bounds(make_concentration_params(c, eps, eps));
    CHECK(bounds.mu1 == doctest::Approx(0.999990952293581).epsilon(1e-12));
    CHECK(bounds.mu2 == doctest::Approx(0.999983520917296).epsilon(1e-12));
    CHECK(bounds.combined_failure == doctest::Approx(3.999948946421753).epsilon(1e-12));
    CHECK(bounds.combined_epsilon == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("tail bounds shrink with the deviation and grow with the horizon") {
    ConcentrationParams params;
    params.r_tilde = 0.99;
    params.r = 0.995;
    params.T = 200;
    params.b = 0.4;
    double prev_mu1 = 1.0;
    for (double eps1 : {0.5, 2.0, 8.0, 32.0}) {
        params.epsilon1 = eps1;
        params.epsilon2 = 1.0;
        const double mu1 = azuma_bounds(params).mu1;
        CHECK(mu1 < prev_mu1);
        prev_mu1 = mu1;
    }
    params.epsilon1 = params.epsilon2 = 4.0;
    double prev = 0.0;
    for (std::int64_t T : {100, 200, 400, 800}) {
        params.T = T;  // r, r~ held fixed
        const double mu1 = azuma_bounds(params).mu1;
        CHECK(mu1 > prev);
        prev = mu1;
    }
}

TEST_CASE("compensated processes have vanishing residuals state by state") {
    SimConfig c = check_config(500, 200);
    for (std::int64_t t : {0L, 60L, 119L}) {
        const auto residuals = martingale_residuals(c, t, MartingaleKind::NaturalPhase);
        REQUIRE(residuals.size() == 501);
        for (double r : residuals) CHECK(std::abs(r) <= 1e-12);
    }
    for (std::int64_t t : {120L, 160L, 199L}) {
        CHECK(martingale_residual(c, t, MartingaleKind::InfluencedPhase) <= 1e-12);
    }
}

TEST_CASE("natural-phase residual sign flips with the rate ordering") {
    // unequal rates break the martingale: p > q drifts the compensated
    // process upward (submartingale), p < q downward
    SimConfig c = check_config(200, 200);
    c.behavior = BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5);
    const auto up = martingale_residuals(c, 10, MartingaleKind::NaturalPhase);
    for (double r : up) CHECK(r >= -1e-15);
    CHECK(up[100] > 0.0);
    c.behavior = BehaviorSpec::hybrid_sc(0.4, 0.8, 0.5);
    const auto down = martingale_residuals(c, 10, MartingaleKind::NaturalPhase);
    for (double r : down) CHECK(r <= 1e-15);
}

TEST_CASE("phase mismatches are rejected") {
    SimConfig c = check_config();
    CHECK_THROWS_AS(martingale_residuals(c, 10, MartingaleKind::InfluencedPhase), PhaseMismatch);
    CHECK_THROWS_AS(martingale_residuals(c, 150, MartingaleKind::NaturalPhase), PhaseMismatch);
    CHECK_THROWS_AS(martingale_residuals(c, 500, MartingaleKind::NaturalPhase), PhaseMismatch);
}

TEST_CASE("oversized deviations always pass the tail check") {
    const SimConfig c = check_config();
    const EnsembleStats stats = simulate_ensemble(c, 200, 607);
    const ConcentrationReport report = concentration_check(c, stats, 1.5);
    CHECK(report.empirical_tail == 0.0);
    CHECK(report.pass);
}

TEST_CASE("a frozen process matches its approximation exactly") {
    SimConfig c = check_config();
    c.behavior = BehaviorSpec::hybrid_sc(0.0, 0.0, 0.5);  // no natural flips at all
    c.influence = InfluenceSpec(0.0, 0.0);
    const EnsembleStats stats = simulate_ensemble(c, 50, 11);
    for (double eps : {0.01, 0.1, 0.5}) {
        const ConcentrationReport report = concentration_check(c, stats, eps);
        CHECK(report.empirical_tail == 0.0);
        CHECK(report.pass);
    }
}

TEST_CASE("reference configuration passes the tail check") {
    const SimConfig c = check_config();
    const EnsembleStats stats = simulate_ensemble(c, 2000, 424243);
    const ConcentrationReport report = concentration_check(c, stats, 0.1);
    CHECK(report.pass);
    CHECK(report.empirical_tail <= report.analytic_bound);
}
