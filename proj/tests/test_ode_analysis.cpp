#include <doctest.h>

#include <cmath>
#include <random>

#include "opinion/ode_analysis.hpp"

using namespace opinion;

namespace {

SimConfig make_config(std::int64_t M, std::int64_t T, BehaviorSpec behavior, double b = 0.4,
                      double delta0 = 0.5, InfluenceSpec influence = InfluenceSpec(0.1, 0.9)) {
    SimConfig c;
    c.M = M;
    c.T = T;
    c.behavior = behavior;
    c.influence = influence;
    c.delta0 = delta0;
    c.schedule = Schedule::last_fraction(T, b);
    return c;
}

double uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

TEST_CASE("rhs pushes inward at the simplex boundary") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        const BehaviorSpec spec = trial % 2 == 0
                                      ? BehaviorSpec::hybrid_sc(uniform(gen), uniform(gen), uniform(gen))
                                      : BehaviorSpec::hybrid_cr(uniform(gen), uniform(gen), uniform(gen));
        CHECK(ode_rhs(spec, std::nullopt, 0.0, 100.0) >= 0.0);
        CHECK(ode_rhs(spec, std::nullopt, 1.0, 100.0) <= 0.0);
    }
}

TEST_CASE("rhs vanishes at the symmetric point when p equals q") {
    CHECK(ode_rhs(BehaviorSpec::hybrid_sc(0.6, 0.6, 0.3), std::nullopt, 0.5, 50.0) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rhs under influence is a hand-checkable affine value") {
    CHECK(ode_rhs(BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5), InfluenceSpec(0.1, 0.9), 0.5, 100.0) ==
          doctest::Approx(-0.004).epsilon(1e-14));
}

TEST_CASE("influence phase closed form basics") {
    const InfluenceSpec influence(0.1, 0.9);
    CHECK(closed_form_influence_phase(0.37, influence, 0.0, 100.0) == 0.37);
    CHECK(closed_form_influence_phase(0.1, influence, 5000.0, 100.0) ==
          doctest::Approx(0.1).epsilon(1e-12));
    CHECK(closed_form_influence_phase(0.5, influence, 100.0, 100.0) ==
          doctest::Approx(0.1 + 0.4 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(closed_form_influence_phase(0.5, InfluenceSpec(0.0, 0.0), 100.0, 100.0) == 0.5);
}

TEST_CASE("integration of a pure influence horizon matches the closed form") {
    SimConfig c = make_config(100, 500, BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5), 1.0);
    const double cf = closed_form_influence_phase(c.delta0, c.influence, 500.0, 100.0);
    CHECK(std::abs(integrate_final_delta(c) - cf) <= 1e-8);
    const Trajectory traj = integrate(c);
    CHECK(std::abs(traj.final_value() - cf) <= 1e-8);
}

TEST_CASE("symmetric start stays put when p equals q") {
    SimConfig c = make_config(100, 1000, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.7));
    c.schedule = Schedule::first_slots(c.T, 0);
    const Trajectory traj = integrate(c);
    for (double v : traj.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("integrator calibration against the linear closed forms") {
    // p = q route has exact solutions; the fixed-step integrator must stay
    // under 1e-8 across horizon scales including T/M = 1e3
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 12; ++trial) {
        const double p = 0.05 + 0.9 * uniform(gen);
        const double lambda = uniform(gen);
        const double b = 0.1 + 0.9 * uniform(gen);
        const double d0 = uniform(gen);
        const std::int64_t M = 1000;
        const double ratio = std::pow(10.0, -3.0 + 6.0 * uniform(gen));
        const std::int64_t T = std::max<std::int64_t>(1, static_cast<std::int64_t>(M * ratio));
        SimConfig c = make_config(M, T, BehaviorSpec::hybrid_sc(p, p, lambda), b, d0);
        for (Strategy s : {Strategy::First, Strategy::Last}) {
            SimConfig cs = c;
            cs.schedule = s == Strategy::First ? Schedule::first_slots(T, c.schedule.budget())
                                               : Schedule::last_slots(T, c.schedule.budget());
            const double cf = closed_form_final_pq_equal(cs, s);
            CHECK(std::abs(integrate_final_delta(cs) - cf) <= 1e-8);
        }
    }
}

TEST_CASE("slot-resolved and phase-resolved integration agree") {
    SimConfig c = make_config(500, 2000, BehaviorSpec::hybrid_cr(0.2, 0.9, 0.8));
    const Trajectory traj = integrate(c);
    CHECK(std::abs(traj.final_value() - integrate_final_delta(c)) <= 1e-9);
}

TEST_CASE("step budget violations raise the dedicated error") {
    SimConfig c = make_config(10, 100000, BehaviorSpec::hybrid_sc(0.9, 0.2, 0.5));
    IntegrateOptions opts;
    opts.max_total_steps = 100;
    CHECK_THROWS_AS(integrate(c, opts), StepSizeTooCoarse);
    CHECK_THROWS_AS(integrate_final_delta(c, opts), StepSizeTooCoarse);
}

TEST_CASE("equal-rate closed form collapses for degenerate inputs") {
    SimConfig c = make_config(10000, 10000, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.0));
    // lambda = 0: both strategies identical
    CHECK(strategy_diff_pq_equal(c).difference == 0.0);
    c.behavior.mix = 0.5;
    c.influence = InfluenceSpec(0.3, 0.3);
    CHECK(strategy_diff_pq_equal(c).difference == 0.0);
}

TEST_CASE("equal-rate comparison favors influencing last") {
    SimConfig c = make_config(10000, 10000, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5));
    const StrategyDiffReport report = strategy_diff_pq_equal(c);
    CHECK(report.difference < 0.0);
    CHECK(report.winner == Winner::SLast);
    CHECK(report.delta_first_final - report.delta_last_final ==
          doctest::Approx(-report.difference).epsilon(1e-12));
}

TEST_CASE("equal-rate closed form rejects unequal rates") {
    SimConfig c = make_config(100, 100, BehaviorSpec::hybrid_sc(0.5, 0.52, 0.5));
    CHECK_THROWS_AS(closed_form_final_pq_equal(c, Strategy::Last), ModelMismatch);
    c.behavior = BehaviorSpec::hybrid_cr(0.5, 0.5, 0.5);
    CHECK_THROWS_AS(strategy_diff_pq_equal(c), ModelMismatch);
}

TEST_CASE("a full budget leaves no natural phase and hence no gap") {
    SimConfig c = make_config(100, 200, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5), 1.0);
    CHECK(strategy_diff_pq_equal(c).difference == 0.0);
}

TEST_CASE("product form equals subtraction over a parameter grid") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 200; ++trial) {
        const double p = uniform(gen);
        const double qt = uniform(gen);
        const double pt = uniform(gen) * qt;
        SimConfig c = make_config(
            1000, std::max<std::int64_t>(1, static_cast<std::int64_t>(5000 * uniform(gen))),
            BehaviorSpec::hybrid_sc(p, p, uniform(gen)), 0.05 + 0.95 * uniform(gen), uniform(gen),
            InfluenceSpec(pt, qt));
        const StrategyDiffReport r = strategy_diff_pq_equal(c);  // throws if identity fails
        CHECK(std::abs(r.difference - (r.delta_last_final - r.delta_first_final)) <= 1e-12);
    }
}

TEST_CASE("quadratic roots: degenerate tags") {
    CHECK(quadratic_roots(BehaviorSpec::hybrid_sc(0.5, 0.5, 0.3), 100).case_tag ==
          CaseTag::Degenerate);
    CHECK(quadratic_roots(BehaviorSpec::hybrid_sc(0.8, 0.4, 1.0), 100).case_tag ==
          CaseTag::Degenerate);
    CHECK(quadratic_roots(BehaviorSpec::hybrid_sc(0.8, 0.4, 1.0 - 1e-10), 100).case_tag ==
          CaseTag::Degenerate);
    CHECK_THROWS_AS(quadratic_roots(BehaviorSpec::hybrid_cr(0.8, 0.4, 0.5), 100), ModelMismatch);
}

TEST_CASE("quadratic roots: ranges in the two cases") {
    for (int i = 1; i <= 19; ++i) {
        const double lambda = i / 20.0;
        const QuadraticRoots gt = quadratic_roots(BehaviorSpec::hybrid_sc(0.8, 0.4, lambda), 100);
        CHECK(gt.case_tag == CaseTag::PGreaterQ);
        CHECK(gt.a1 > 0.0);
        CHECK(gt.a1 < 1.0);
        CHECK(gt.a2 < 0.0);
        CHECK(gt.a1 > gt.a2);
        CHECK(gt.discriminant > 0.0);
        const QuadraticRoots lt = quadratic_roots(BehaviorSpec::hybrid_sc(0.4, 0.8, lambda), 100);
        CHECK(lt.case_tag == CaseTag::PLessQ);
        CHECK(lt.a1 >= 1.0);
        CHECK(lt.a2 >= 0.0);
        CHECK(lt.a2 <= 0.4 / 1.2 + 1e-12);
    }
}

TEST_CASE("quadratic roots at zero mixing solve the conformist flow") {
    const QuadraticRoots roots = quadratic_roots(BehaviorSpec::hybrid_sc(0.4, 0.8, 0.0), 100);
    CHECK(roots.a1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(roots.a2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quadratic root residuals vanish") {
    std::mt19937_64 gen(29);
    for (int trial = 0; trial < 100; ++trial) {
        double p = uniform(gen), q = uniform(gen);
        if (std::abs(p - q) < 0.01) continue;
        const double lambda = 0.95 * uniform(gen);
        const DriftPoly drift = natural_drift(BehaviorSpec::hybrid_sc(p, q, lambda));
        const QuadraticRoots roots = quadratic_roots(BehaviorSpec::hybrid_sc(p, q, lambda), 100);
        CHECK(std::abs(drift.eval(roots.a1)) / 100.0 <= 1e-10 * std::max(1.0, roots.a1 * roots.a1));
        CHECK(std::abs(drift.eval(roots.a2)) / 100.0 <= 1e-10);
    }
}

TEST_CASE("general closed form with a full budget reduces to the influence phase") {
    SimConfig c = make_config(1000, 800, BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5), 1.0);
    const double want = closed_form_influence_phase(c.delta0, c.influence, 800.0, 1000.0);
    CHECK(closed_form_final_general(c, Strategy::First) == doctest::Approx(want).epsilon(1e-12));
    CHECK(closed_form_final_general(c, Strategy::Last) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("general closed form refuses degenerate parameters") {
    SimConfig c = make_config(100, 100, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5));
    CHECK_THROWS_AS(closed_form_final_general(c, Strategy::Last), DegenerateCase);
    CHECK_THROWS_AS(strategy_diff_general(c), DegenerateCase);
}

TEST_CASE("influence-last dominates for p > q across the mixing grid") {
    for (int i = 0; i <= 20; ++i) {
        SimConfig c = make_config(1000, 1000, BehaviorSpec::hybrid_sc(0.8, 0.4, i / 20.0));
        const StrategyDiffReport r = strategy_diff_closed_form(c);
        if (i == 0 || i == 20) continue;  // degenerate-boundary mixes route elsewhere
        CHECK(r.difference < 0.0);
        CHECK(r.winner == Winner::SLast);
    }
}

TEST_CASE("closed form matches integration over a random parameter grid") {
    std::mt19937_64 gen(31);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        double p = uniform(gen), q = uniform(gen);
        if (std::abs(p - q) < 0.02) continue;
        const double lambda = 0.02 + 0.93 * uniform(gen);
        const double b = 0.05 + 0.95 * uniform(gen);
        const double qt = 0.05 + 0.95 * uniform(gen);
        const double pt = uniform(gen) * qt;
        const std::int64_t M = 1000;
        const double ratio = std::pow(10.0, -3.0 + 6.0 * uniform(gen));
        const std::int64_t T = std::max<std::int64_t>(1, static_cast<std::int64_t>(M * ratio));
        SimConfig c = make_config(M, T, BehaviorSpec::hybrid_sc(p, q, lambda), b, uniform(gen),
                                  InfluenceSpec(pt, qt));
        for (Strategy s : {Strategy::First, Strategy::Last}) {
            SimConfig cs = c;
            cs.schedule = s == Strategy::First ? Schedule::first_slots(T, c.schedule.budget())
                                               : Schedule::last_slots(T, c.schedule.budget());
            CHECK(std::abs(closed_form_final_general(cs, s) - integrate_final_delta(cs)) <= 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 60);
}

TEST_CASE("grouped difference equals subtraction of the finals") {
    std::mt19937_64 gen(37);
    for (int trial = 0; trial < 100; ++trial) {
        double p = uniform(gen), q = uniform(gen);
        if (std::abs(p - q) < 0.02) continue;
        const double qt = 0.05 + 0.95 * uniform(gen);
        SimConfig c = make_config(
            1000, std::max<std::int64_t>(2, static_cast<std::int64_t>(50000 * uniform(gen))),
            BehaviorSpec::hybrid_sc(p, q, 0.02 + 0.93 * uniform(gen)), 0.05 + 0.9 * uniform(gen),
            uniform(gen), InfluenceSpec(uniform(gen) * qt, qt));
        const StrategyDiffReport r = strategy_diff_general(c);  // in-function identity check
        CHECK(std::abs(r.difference - (r.delta_last_final - r.delta_first_final)) <= 1e-9);
        CHECK(r.aux.has_value());
    }
}

TEST_CASE("winner flips across the crossover for p < q at the native horizon") {
    // p<q comparison: positive difference (first wins) at small mixing,
    // negative (last wins) at large mixing
    SimConfig lo = make_config(1000, 100000, BehaviorSpec::hybrid_sc(0.4, 0.8, 0.05));
    SimConfig hi = make_config(1000, 100000, BehaviorSpec::hybrid_sc(0.4, 0.8, 0.5));
    CHECK(strategy_diff_general(lo).difference > 0.0);
    CHECK(strategy_diff_general(hi).difference < 0.0);
}

TEST_CASE("perfect influence with p = 0 always favors influencing first") {
    for (int i = 0; i <= 9; ++i) {
        SimConfig c = make_config(1000, 1000, BehaviorSpec::hybrid_sc(0.0, 0.8, i / 10.0), 0.4,
                                  0.5, InfluenceSpec(0.0, 1.0));
        const StrategyDiffReport r = strategy_diff_general(c);
        CHECK(r.difference > 0.0);
        CHECK(r.winner == Winner::SFirst);
    }
}

TEST_CASE("asymptotic long-horizon value for p > q is the negated upper root") {
    SimConfig c = make_config(1000, 1000000, BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5));
    const QuadraticRoots roots = quadratic_roots(c.behavior, 1000.0);
    CHECK(asymptotic_diff(c, Regime::LongHorizon) == doctest::Approx(-roots.a1).epsilon(1e-12));
    CHECK(asymptotic_diff(c, Regime::LongHorizon) < 0.0);
}

TEST_CASE("asymptotic short-horizon sign at zero mixing is positive for p < q") {
    SimConfig c = make_config(1000000, 1000, BehaviorSpec::hybrid_sc(0.4, 0.8, 1e-12));
    CHECK(asymptotic_diff(c, Regime::ShortHorizon) > 0.0);
}

TEST_CASE("short-horizon asymptotic sign agrees with the closed form away from the crossover") {
    // T/M = 1e-3; exclude a 0.02-wide mixing band around the crossover
    SimConfig tmpl = make_config(1000000, 1000, BehaviorSpec::hybrid_sc(0.4, 0.8, 0.5));
    const std::optional<double> lambda_star = crossover_lambda(tmpl);
    REQUIRE(lambda_star.has_value());
    for (int i = 1; i <= 99; ++i) {
        const double lambda = i / 100.0;
        if (std::abs(lambda - *lambda_star) <= 0.02) continue;
        SimConfig c = tmpl;
        c.behavior.mix = lambda;
        const double asym = asymptotic_diff(c, Regime::ShortHorizon);
        const double exact = strategy_diff_general(c).difference;
        CHECK(asym * exact > 0.0);
    }
}

TEST_CASE("asymptotic value approximates the closed form deep in the short-horizon regime") {
    SimConfig c = make_config(10000000, 1000, BehaviorSpec::hybrid_sc(0.4, 0.8, 0.45));
    const double asym = asymptotic_diff(c, Regime::ShortHorizon);
    const double exact = strategy_diff_general(c).difference;
    CHECK(asym == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("crossover scan returns nothing when one strategy dominates") {
    SimConfig c = make_config(1000, 1000, BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5));
    CHECK_FALSE(crossover_lambda(c).has_value());
}

TEST_CASE("long-horizon crossover sits where the lower root meets the influence target") {
    SimConfig c = make_config(1000, 1000000, BehaviorSpec::hybrid_sc(0.4, 0.8, 0.5));
    const std::optional<double> found = crossover_lambda(c);
    REQUIRE(found.has_value());
    // independent oracle: bisect a2'(lambda) = p~/(p~+q~)
    double lo = 1e-6, hi = 1.0 - 1e-6;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double a2 = quadratic_roots(BehaviorSpec::hybrid_sc(0.4, 0.8, mid), 1000.0).a2;
        (a2 < 0.1 ? lo : hi) = mid;
    }
    CHECK(*found == doctest::Approx(0.5 * (lo + hi)).epsilon(2e-4));
}

TEST_CASE("native-horizon crossover exists and splits the winners") {
    SimConfig c = make_config(1000, 100000, BehaviorSpec::hybrid_sc(0.4, 0.8, 0.5));
    const std::optional<double> lambda_star = crossover_lambda(c);
    REQUIRE(lambda_star.has_value());
    CHECK(*lambda_star > 0.0);
    CHECK(*lambda_star < 1.0);
    SimConfig below = c, above = c;
    below.behavior.mix = std::max(1e-6, *lambda_star - 0.05);
    above.behavior.mix = std::min(1.0 - 1e-6, *lambda_star + 0.05);
    CHECK(strategy_diff_closed_form(below).difference > 0.0);
    CHECK(strategy_diff_closed_form(above).difference < 0.0);
}

TEST_CASE("threshold predicate basics") {
    CHECK(model2_threshold(0.6, 0.3, 0.4, 0.3) == Winner::SLast);
    CHECK(model2_threshold(0.6, 0.9, 0.1, 0.49) == Winner::SLast);
    const double tie_p = 0.36 / (1.0 - 0.36) * 0.4;
    CHECK(model2_threshold(0.6, tie_p, 0.4, 0.8) == Winner::Tie);
    CHECK(model2_threshold(0.5, 0.2, 0.9, 0.9, Regime::LongHorizon) == Winner::SLast);
    CHECK_THROWS_AS(model2_threshold(0.0, 0.5, 0.5, 0.5), ValidationError);
}

TEST_CASE("threshold predicate flips along a mixing sweep on the conformist/rebel model") {
    // p=0.2, q=0.9, delta0=0.5: the predicate switches from last to first
    int flips = 0;
    Winner prev = model2_threshold(0.5, 0.2, 0.9, 0.51);
    for (int i = 52; i <= 99; ++i) {
        const Winner w = model2_threshold(0.5, 0.2, 0.9, i / 100.0);
        if (w != prev) ++flips;
        prev = w;
    }
    CHECK(flips == 1);
    CHECK(prev == Winner::SFirst);
}

TEST_CASE("short-horizon winner oracle agrees with integration for the conformist/rebel model") {
    // perfect influence, T/M = 1e-4; points near a tie surface are skipped
    std::mt19937_64 gen(41);
    int checked = 0;
    while (checked < 25) {
        const double p = 0.05 + 0.9 * uniform(gen);
        const double q = 0.05 + 0.9 * uniform(gen);
        const double mu = uniform(gen);
        const double d0 = 0.1 + 0.8 * uniform(gen);
        const BehaviorSpec behavior = BehaviorSpec::hybrid_cr(p, q, mu);
        const InfluenceSpec influence(0.0, 1.0);
        const DriftPoly drift = natural_drift(behavior);
        const double score = drift.a2 * d0 * d0 - drift.a0;
        if (std::abs(score) < 0.02) continue;
        SimConfig c = make_config(1000000, 100, behavior, 0.4, d0, influence);
        const double diff = strategy_diff_ode(c).difference;
        const Winner ode_winner = diff > 0.0 ? Winner::SFirst : Winner::SLast;
        CHECK(small_horizon_winner(behavior, influence, d0) == ode_winner);
        ++checked;
    }
}

TEST_CASE("degenerate routes of the dispatcher match integration") {
    SimConfig pq = make_config(1000, 2000, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.6));
    CHECK(std::abs(closed_form_final(pq, Strategy::Last) - integrate_final_delta(pq)) <= 1e-8);
    SimConfig lin = make_config(1000, 2000, BehaviorSpec::hybrid_sc(0.8, 0.4, 1.0));
    CHECK(std::abs(closed_form_final(lin, Strategy::Last) - integrate_final_delta(lin)) <= 1e-8);
    const StrategyDiffReport lr = strategy_diff_closed_form(lin);
    CHECK(std::abs(lr.difference - (lr.delta_last_final - lr.delta_first_final)) <= 1e-12);
}

TEST_CASE("integrated trajectories stay inside the unit interval") {
    std::mt19937_64 gen(43);
    for (int trial = 0; trial < 20; ++trial) {
        const BehaviorSpec behavior =
            trial % 2 == 0 ? BehaviorSpec::hybrid_sc(uniform(gen), uniform(gen), uniform(gen))
                           : BehaviorSpec::hybrid_cr(uniform(gen), uniform(gen), uniform(gen));
        const double qt = uniform(gen);
        SimConfig c = make_config(200, 500, behavior, 0.3 + 0.7 * uniform(gen), uniform(gen),
                                  InfluenceSpec(uniform(gen) * qt, qt));
        for (double v : integrate(c).values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("monte carlo comparison carries its uncertainty") {
    SimConfig c = make_config(2000, 2000, BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5));
    const StrategyDiffReport r = strategy_diff_mc(c, 100, 90210, 0);
    CHECK(r.method == DiffMethod::MonteCarlo);
    CHECK(r.diff_stderr.has_value());
    CHECK(*r.diff_stderr > 0.0);
    CHECK(r.tie_tolerance == doctest::Approx(3.0 * *r.diff_stderr));
}
