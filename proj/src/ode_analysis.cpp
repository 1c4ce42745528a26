#include "opinion/ode_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opinion {

namespace {

constexpr double kDegenerateTol = 1e-9;

struct PhaseDurations {
    double influenced;  // budget slots
    double natural;     // T - budget slots
};

PhaseDurations phase_durations(const SimConfig& config) {
    const double tau_i = static_cast<double>(config.schedule.budget());
    return PhaseDurations{tau_i, static_cast<double>(config.T) - tau_i};
}

void require_hybrid_sc(const SimConfig& config, const char* what) {
    if (!config.behavior.is_hybrid_sc())
        throw ModelMismatch(std::string(what) + " requires the strong/conformist hybrid");
}

// x -> target + (x - target) e^{-rate * tau}; rate == 0 degenerates to a
// constant-drift shift.
double affine_phase_map(double x, double target, double rate, double drift0, double tau) {
    if (rate == 0.0) return x + drift0 * tau;
    return target + (x - target) * std::exp(-rate * tau);
}

// Solution map of d(delta)/dt = kappa (delta - a1)(delta - a2) over `tau`,
// written so that a growing log-ratio factor (kappa > 0) never overflows.
double logistic_phase_map(double x, double a1, double a2, double kappa, double tau) {
    const double w = kappa * (a1 - a2) * tau;
    if (w == 0.0 || x == a1 || x == a2) return x;
    const double r = (x - a1) / (x - a2);
    if (w < 0.0) {
        const double denom = 1.0 - r * std::exp(w);
        if (std::abs(denom) < 1e-12)
            throw NumericalBlowup("logistic phase denominator vanished");
        return a2 + (a1 - a2) / denom;
    }
    const double e = std::exp(-w);
    const double denom = e - r;
    if (denom == 0.0) return x;
    return a2 + (a1 - a2) * e / denom;
}

}  // namespace

Winner winner_from_difference(double difference, double tolerance) {
    if (difference < -tolerance) return Winner::SLast;
    if (difference > tolerance) return Winner::SFirst;
    return Winner::Tie;
}

QuadraticRoots quadratic_roots(const BehaviorSpec& behavior, double M) {
    if (!behavior.is_hybrid_sc())
        throw ModelMismatch("quadratic roots are defined for the strong/conformist hybrid");
    if (!(M > 0.0)) throw ValidationError("population scale M must be positive");
    QuadraticRoots roots;
    const DriftPoly drift = natural_drift(behavior);
    const double disc = drift.a1 * drift.a1 - 4.0 * drift.a2 * drift.a0;
    roots.discriminant = disc / (M * M);
    const double lambda = behavior.mix;
    if (std::abs(behavior.p - behavior.q) <= kDegenerateTol || lambda >= 1.0 - kDegenerateTol) {
        roots.case_tag = CaseTag::Degenerate;
        return roots;
    }
    roots.case_tag = behavior.p > behavior.q ? CaseTag::PGreaterQ : CaseTag::PLessQ;
    // stable quadratic roots: avoid cancellation in -a1 -+ sqrt(disc)
    const double s = std::sqrt(disc);
    const double qq = -0.5 * (drift.a1 + std::copysign(s, drift.a1));
    const double r1 = qq / drift.a2;
    const double r2 = drift.a0 / qq;
    roots.a1 = std::max(r1, r2);
    roots.a2 = std::min(r1, r2);
    for (double root : {roots.a1, roots.a2}) {
        const double residual = std::abs(drift.eval(root)) / M;
        if (residual > 1e-10 * std::max(1.0, root * root))
            throw NumericalBlowup("quadratic root residual " + std::to_string(residual));
    }
    return roots;
}

double ode_rhs(const BehaviorSpec& behavior, const std::optional<InfluenceSpec>& influence,
               double delta, double M) {
    const SlotRates rates = effective_rates(behavior, influence, delta);
    return ((1.0 - delta) * rates.p_t - delta * rates.q_t) / M;
}

// ---------------------------------------------------------------------------
// Numerical integration
// ---------------------------------------------------------------------------

namespace {

// drift/M as a polynomial; influenced phases are affine in delta.
struct PhaseRhs {
    double a2, a1, a0;  // unscaled drift coefficients
    double inv_M;
    double operator()(double d) const { return ((a2 * d + a1) * d + a0) * inv_M; }
    double lipschitz() const {
        return std::max(std::abs(a1), std::abs(2.0 * a2 + a1)) * inv_M;
    }
};

PhaseRhs phase_rhs(const SimConfig& config, bool influenced) {
    const double inv_M = 1.0 / static_cast<double>(config.M);
    if (influenced) {
        const double s = config.influence.p_tilde + config.influence.q_tilde;
        return PhaseRhs{0.0, -s, config.influence.p_tilde, inv_M};
    }
    const DriftPoly drift = natural_drift(config.behavior);
    return PhaseRhs{drift.a2, drift.a1, drift.a0, inv_M};
}

double rk4_advance(const PhaseRhs& f, double x, double tau, std::int64_t steps) {
    const double h = tau / static_cast<double>(steps);
    for (std::int64_t i = 0; i < steps; ++i) {
        const double k1 = f(x);
        const double k2 = f(x + 0.5 * h * k1);
        const double k3 = f(x + 0.5 * h * k2);
        const double k4 = f(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

double clamp_unit(double x, const char* what) {
    if (x < -1e-9 || x > 1.0 + 1e-9)
        throw NumericalBlowup(std::string(what) + " left [0,1]: " + std::to_string(x));
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace

Trajectory integrate(const SimConfig& config, const IntegrateOptions& opts) {
    config.validate();
    Trajectory traj;
    traj.source = TrajectorySource::OdeNumeric;
    traj.times.reserve(static_cast<std::size_t>(config.T) + 1);
    traj.values.reserve(static_cast<std::size_t>(config.T) + 1);
    double x = config.delta0;
    traj.times.push_back(0);
    traj.values.push_back(x);
    std::int64_t total_steps = 0;
    for (const Schedule::Run& run : config.schedule.runs()) {
        const PhaseRhs f = phase_rhs(config, run.influenced);
        const std::int64_t substeps = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(f.lipschitz() * opts.steps_per_unit)));
        total_steps += substeps * run.length;
        if (total_steps > opts.max_total_steps)
            throw StepSizeTooCoarse("slot-resolved integration over " +
                                    std::to_string(config.T) + " slots exceeds the step budget");
        for (std::int64_t s = 0; s < run.length; ++s) {
            x = clamp_unit(rk4_advance(f, x, 1.0, substeps), "integrated trajectory");
            traj.times.push_back(run.start + s + 1);
            traj.values.push_back(x);
        }
    }
    return traj;
}

double integrate_final_delta(const SimConfig& config, const IntegrateOptions& opts) {
    config.validate();
    double x = config.delta0;
    std::int64_t total_steps = 0;
    for (const Schedule::Run& run : config.schedule.runs()) {
        const PhaseRhs f = phase_rhs(config, run.influenced);
        const double tau = static_cast<double>(run.length);
        const std::int64_t steps = std::max<std::int64_t>(
            opts.min_steps_per_phase,
            static_cast<std::int64_t>(std::ceil(f.lipschitz() * tau * opts.steps_per_unit)));
        total_steps += steps;
        if (total_steps > opts.max_total_steps)
            throw StepSizeTooCoarse("phase integration exceeds the step budget of " +
                                    std::to_string(opts.max_total_steps));
        x = clamp_unit(rk4_advance(f, x, tau, steps), "integrated final value");
    }
    return x;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

double closed_form_influence_phase(double delta_start, const InfluenceSpec& influence,
                                   double duration, double M) {
    influence.validate();
    const double s = influence.p_tilde + influence.q_tilde;
    if (s <= 0.0 || duration == 0.0) return delta_start;
    const double fp = influence.p_tilde / s;
    return fp + (delta_start - fp) * std::exp(-duration * s / M);
}

namespace {

// p == q evaluation with an explicit effective p (the dispatcher may feed
// the average of nearly-equal p and q).
double pq_equal_final(const SimConfig& config, Strategy strategy, double p_eff) {
    const double M = static_cast<double>(config.M);
    const PhaseDurations tau = phase_durations(config);
    const double lambda = config.behavior.mix;
    const double fp = config.influence.fixed_point();
    const double e_nat = std::exp(-2.0 * lambda * p_eff * tau.natural / M);
    const double e_inf =
        std::exp(-(config.influence.p_tilde + config.influence.q_tilde) * tau.influenced / M);
    if (strategy == Strategy::First) {
        return 0.5 + (fp - 0.5) * e_nat + (config.delta0 - fp) * e_nat * e_inf;
    }
    return fp + (0.5 - fp) * e_inf + (config.delta0 - 0.5) * e_nat * e_inf;
}

StrategyDiffReport pq_equal_diff(const SimConfig& config, double p_eff) {
    const double M = static_cast<double>(config.M);
    const PhaseDurations tau = phase_durations(config);
    const double lambda = config.behavior.mix;
    const double fp = config.influence.fixed_point();
    const double one_minus_e_inf =
        -std::expm1(-(config.influence.p_tilde + config.influence.q_tilde) * tau.influenced / M);
    const double one_minus_e_nat = -std::expm1(-2.0 * lambda * p_eff * tau.natural / M);
    // first-minus-last is a product of three factors; the reported
    // difference is last-minus-first
    const double first_minus_last = (0.5 - fp) * one_minus_e_inf * one_minus_e_nat;

    StrategyDiffReport report;
    report.delta_first_final = pq_equal_final(config, Strategy::First, p_eff);
    report.delta_last_final = pq_equal_final(config, Strategy::Last, p_eff);
    report.difference = -first_minus_last;
    report.method = DiffMethod::ClosedForm;
    report.tie_tolerance = 1e-9;
    report.winner = winner_from_difference(report.difference, report.tie_tolerance);
    const double by_subtraction = report.delta_last_final - report.delta_first_final;
    if (std::abs(report.difference - by_subtraction) > 1e-12)
        throw NumericalBlowup("product form and subtraction disagree by " +
                              std::to_string(report.difference - by_subtraction));
    return report;
}

void require_pq_equal(const SimConfig& config) {
    require_hybrid_sc(config, "the p == q closed form");
    if (std::abs(config.behavior.p - config.behavior.q) > 1e-12)
        throw ModelMismatch("the p == q closed form needs p == q within 1e-12");
}

}  // namespace

double closed_form_final_pq_equal(const SimConfig& config, Strategy strategy) {
    config.validate();
    require_pq_equal(config);
    return pq_equal_final(config, strategy, config.behavior.p);
}

StrategyDiffReport strategy_diff_pq_equal(const SimConfig& config) {
    config.validate();
    require_pq_equal(config);
    return pq_equal_diff(config, config.behavior.p);
}

namespace {

struct GeneralCaseData {
    QuadraticRoots roots;
    double kappa;      // quadratic coefficient of the drift, over M
    double rate;       // |kappa| (a1 - a2) = sqrt(discriminant)
    double w;          // signed log-ratio exponent over the natural phase
    double fp;         // influenced fixed point
    double e_inf;      // influenced-phase decay over the budget
    double one_minus_e_inf;
};

GeneralCaseData general_case_data(const SimConfig& config) {
    require_hybrid_sc(config, "the general closed form");
    GeneralCaseData d;
    d.roots = quadratic_roots(config.behavior, static_cast<double>(config.M));
    if (d.roots.case_tag == CaseTag::Degenerate)
        throw DegenerateCase("quadratic coefficient vanishes; use the linear closed forms");
    const double M = static_cast<double>(config.M);
    const PhaseDurations tau = phase_durations(config);
    d.kappa = natural_drift(config.behavior).a2 / M;
    d.rate = std::abs(d.kappa) * (d.roots.a1 - d.roots.a2);
    d.w = d.kappa * (d.roots.a1 - d.roots.a2) * tau.natural;
    d.fp = config.influence.fixed_point();
    const double s = config.influence.p_tilde + config.influence.q_tilde;
    d.e_inf = std::exp(-s * tau.influenced / M);
    d.one_minus_e_inf = -std::expm1(-s * tau.influenced / M);
    return d;
}

}  // namespace

double closed_form_final_general(const SimConfig& config, Strategy strategy) {
    config.validate();
    const GeneralCaseData d = general_case_data(config);
    const PhaseDurations tau = phase_durations(config);
    const double M = static_cast<double>(config.M);
    double x;
    if (strategy == Strategy::First) {
        x = closed_form_influence_phase(config.delta0, config.influence, tau.influenced, M);
        x = logistic_phase_map(x, d.roots.a1, d.roots.a2, d.kappa, tau.natural);
    } else {
        x = logistic_phase_map(config.delta0, d.roots.a1, d.roots.a2, d.kappa, tau.natural);
        x = closed_form_influence_phase(x, config.influence, tau.influenced, M);
    }
    return clamp_unit(x, "closed-form final value");
}

StrategyDiffReport strategy_diff_general(const SimConfig& config) {
    config.validate();
    const GeneralCaseData d = general_case_data(config);
    const double a1 = d.roots.a1;
    const double a2 = d.roots.a2;
    const double G = a1 - a2;
    const double d0 = config.delta0;
    const double dbt = d.fp + (d0 - d.fp) * d.e_inf;  // after an influenced-first phase
    const double u = (d0 == a1) ? 0.0 : (d0 - a1) / (d0 - a2);
    const double v = (dbt == a1) ? 0.0 : (dbt - a1) / (dbt - a2);
    const double d3 = (dbt - a2) * (d0 - a2);
    const double beta = d.one_minus_e_inf;

    // last-minus-first, grouped so that a growing natural-phase factor
    // (w > 0) never overflows: divide the D products through by e^{2w}.
    double term1, term2;
    double lit_d1, lit_d2;
    if (d.w <= 0.0) {
        const double ex = std::exp(d.w);
        lit_d1 = 1.0 - u * ex;
        lit_d2 = 1.0 - v * ex;
        if (std::abs(lit_d1) < 1e-12 || std::abs(lit_d2) < 1e-12)
            throw NumericalBlowup("closed-form denominator vanished");
        term1 = beta * (d.fp - a2) * (1.0 - ex * G * G / (lit_d1 * lit_d2 * d3));
        term2 = beta * G * (-std::expm1(d.w)) / (lit_d1 * lit_d2);
    } else {
        const double e = std::exp(-d.w);
        const double du = e - u;
        const double dv = e - v;
        if (du == 0.0 || dv == 0.0)
            throw NumericalBlowup("closed-form denominator vanished");
        term1 = beta * (d.fp - a2) * (1.0 - e * G * G / (du * dv * d3));
        term2 = beta * G * (e * std::expm1(-d.w)) / (du * dv);
        lit_d1 = u == 0.0 ? 1.0 : 1.0 - u * std::exp(d.w);
        lit_d2 = v == 0.0 ? 1.0 : 1.0 - v * std::exp(d.w);
    }

    StrategyDiffReport report;
    report.difference = term1 - term2;
    report.delta_last_final = closed_form_final_general(config, Strategy::Last);
    report.delta_first_final = closed_form_final_general(config, Strategy::First);
    report.method = DiffMethod::ClosedForm;
    report.tie_tolerance = 1e-9;
    report.winner = winner_from_difference(report.difference, report.tie_tolerance);
    report.aux = ClosedFormAux{d.rate, lit_d1, lit_d2, d3};
    const double by_subtraction = report.delta_last_final - report.delta_first_final;
    if (std::abs(report.difference - by_subtraction) > 1e-9)
        throw NumericalBlowup("grouped difference and subtraction disagree by " +
                              std::to_string(report.difference - by_subtraction));
    return report;
}

namespace {

enum class ClosedFormRoute { General, PqEqual, Linear };

ClosedFormRoute closed_form_route(const SimConfig& config) {
    require_hybrid_sc(config, "the closed-form engine");
    if (std::abs(config.behavior.p - config.behavior.q) <= kDegenerateTol)
        return ClosedFormRoute::PqEqual;
    if (config.behavior.mix >= 1.0 - kDegenerateTol) return ClosedFormRoute::Linear;
    return ClosedFormRoute::General;
}

// Nearly strong-willed natural phase: affine decay toward p/(p+q).
double linear_final(const SimConfig& config, Strategy strategy) {
    const double M = static_cast<double>(config.M);
    const PhaseDurations tau = phase_durations(config);
    const double p = config.behavior.p;
    const double q = config.behavior.q;
    const double rate = (p + q) / M;
    const double target = (p + q) > 0.0 ? p / (p + q) : 0.0;
    auto natural = [&](double x) { return affine_phase_map(x, target, rate, p / M, tau.natural); };
    auto influenced = [&](double x) {
        return closed_form_influence_phase(x, config.influence, tau.influenced, M);
    };
    return strategy == Strategy::First ? natural(influenced(config.delta0))
                                       : influenced(natural(config.delta0));
}

StrategyDiffReport linear_diff(const SimConfig& config) {
    const double M = static_cast<double>(config.M);
    const PhaseDurations tau = phase_durations(config);
    const double p = config.behavior.p;
    const double q = config.behavior.q;
    const double fp = config.influence.fixed_point();
    const double target = (p + q) > 0.0 ? p / (p + q) : 0.0;
    const double one_minus_e_nat = -std::expm1(-(p + q) * tau.natural / M);
    const double one_minus_e_inf =
        -std::expm1(-(config.influence.p_tilde + config.influence.q_tilde) * tau.influenced / M);
    StrategyDiffReport report;
    report.delta_last_final = linear_final(config, Strategy::Last);
    report.delta_first_final = linear_final(config, Strategy::First);
    report.difference = (fp - target) * one_minus_e_nat * one_minus_e_inf;
    report.method = DiffMethod::ClosedForm;
    report.tie_tolerance = 1e-9;
    report.winner = winner_from_difference(report.difference, report.tie_tolerance);
    return report;
}

}  // namespace

double closed_form_final(const SimConfig& config, Strategy strategy) {
    config.validate();
    switch (closed_form_route(config)) {
        case ClosedFormRoute::PqEqual:
            return pq_equal_final(config, strategy,
                                  0.5 * (config.behavior.p + config.behavior.q));
        case ClosedFormRoute::Linear:
            return linear_final(config, strategy);
        case ClosedFormRoute::General:
            return closed_form_final_general(config, strategy);
    }
    throw ModelMismatch("unreachable closed-form route");
}

StrategyDiffReport strategy_diff_closed_form(const SimConfig& config) {
    config.validate();
    switch (closed_form_route(config)) {
        case ClosedFormRoute::PqEqual:
            return pq_equal_diff(config, 0.5 * (config.behavior.p + config.behavior.q));
        case ClosedFormRoute::Linear:
            return linear_diff(config);
        case ClosedFormRoute::General:
            return strategy_diff_general(config);
    }
    throw ModelMismatch("unreachable closed-form route");
}

// ---------------------------------------------------------------------------
// Cross-engine comparisons
// ---------------------------------------------------------------------------

namespace {

SimConfig with_strategy(const SimConfig& config, Strategy strategy) {
    SimConfig out = config;
    out.schedule = strategy == Strategy::First
                       ? Schedule::first_slots(config.T, config.schedule.budget())
                       : Schedule::last_slots(config.T, config.schedule.budget());
    return out;
}

}  // namespace

StrategyDiffReport strategy_diff_ode(const SimConfig& config, const IntegrateOptions& opts) {
    StrategyDiffReport report;
    report.delta_last_final = integrate_final_delta(with_strategy(config, Strategy::Last), opts);
    report.delta_first_final = integrate_final_delta(with_strategy(config, Strategy::First), opts);
    report.difference = report.delta_last_final - report.delta_first_final;
    report.method = DiffMethod::OdeNumeric;
    report.tie_tolerance = 1e-9;
    report.winner = winner_from_difference(report.difference, report.tie_tolerance);
    return report;
}

StrategyDiffReport strategy_diff_exact(const SimConfig& config, const MarkovCaps& caps) {
    StrategyDiffReport report;
    report.delta_last_final = 1.0 - exact_final_expectation(with_strategy(config, Strategy::Last), caps);
    report.delta_first_final =
        1.0 - exact_final_expectation(with_strategy(config, Strategy::First), caps);
    report.difference = report.delta_last_final - report.delta_first_final;
    report.method = DiffMethod::ExactMarkov;
    report.tie_tolerance = 1e-12;
    report.winner = winner_from_difference(report.difference, report.tie_tolerance);
    return report;
}

StrategyDiffReport strategy_diff_mc(const SimConfig& config, std::int64_t n_reps,
                                    std::uint64_t base_seed, int threads) {
    // independent seed streams per strategy, both derived from base_seed
    const EnsembleStats last = simulate_ensemble(with_strategy(config, Strategy::Last), n_reps,
                                                 mix64(base_seed ^ 0x4CULL), threads);
    const EnsembleStats first = simulate_ensemble(with_strategy(config, Strategy::First), n_reps,
                                                  mix64(base_seed ^ 0x46ULL), threads);
    StrategyDiffReport report;
    report.delta_last_final = last.mean_final_delta;
    report.delta_first_final = first.mean_final_delta;
    report.difference = report.delta_last_final - report.delta_first_final;
    report.method = DiffMethod::MonteCarlo;
    const double se = std::sqrt(last.stderr_final() * last.stderr_final() +
                                first.stderr_final() * first.stderr_final());
    report.diff_stderr = se;
    report.tie_tolerance = 3.0 * se;
    report.winner = winner_from_difference(report.difference, report.tie_tolerance);
    return report;
}

// ---------------------------------------------------------------------------
// Asymptotics, crossover, thresholds
// ---------------------------------------------------------------------------

double asymptotic_diff(const SimConfig& config, Regime regime) {
    config.validate();
    const GeneralCaseData d = general_case_data(config);
    const PhaseDurations tau = phase_durations(config);
    const double a1 = d.roots.a1;
    const double a2 = d.roots.a2;
    if (regime == Regime::LongHorizon) {
        if (d.roots.case_tag == CaseTag::PGreaterQ) return -a1;
        // p < q: the natural attractor a2 is reached, then mostly undone
        const double decay = std::exp(-d.rate * tau.natural);
        return a2 * (decay * (1.0 - a2 / a1) - 1.0);
    }
    // Short horizon: second-order expansion of the closed-form difference in
    // T/M. The bracket couples the roots with the influenced fixed point.
    const double G = a1 - a2;
    const double eta = d.rate * tau.natural;
    const double denom = G - std::copysign(1.0, d.kappa) * eta * (config.delta0 - a1);
    const double psi = (G * G) / (denom * denom);
    const double bracket =
        config.delta0 * config.delta0 - a1 * a2 + d.fp * (a1 + a2 - 2.0 * config.delta0);
    return d.kappa * tau.natural * d.one_minus_e_inf * psi * bracket;
}

std::optional<double> crossover_lambda(const SimConfig& config_template, int grid_points) {
    config_template.validate();
    require_hybrid_sc(config_template, "the crossover scan");
    if (grid_points < 2) throw ValidationError("crossover grid needs at least two points");

    auto diff_at = [&](double lambda) {
        SimConfig c = config_template;
        c.behavior.mix = lambda;
        return strategy_diff_closed_form(c).difference;
    };

    const double lo = 1e-6;
    const double hi = 1.0 - 1e-6;
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    std::vector<double> values(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        values[static_cast<std::size_t>(i)] = diff_at(grid[static_cast<std::size_t>(i)]);
    }

    int change_count = 0;
    int bracket_idx = -1;
    for (int i = 0; i + 1 < grid_points; ++i) {
        const double a = values[static_cast<std::size_t>(i)];
        const double b = values[static_cast<std::size_t>(i + 1)];
        if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) {
            ++change_count;
            bracket_idx = i;
        }
    }
    if (change_count == 0) {
        for (int i = 0; i < grid_points; ++i)
            if (values[static_cast<std::size_t>(i)] == 0.0)
                return grid[static_cast<std::size_t>(i)];
        return std::nullopt;
    }
    if (change_count > 1)
        throw MultipleSignChanges("difference changes sign " + std::to_string(change_count) +
                                  " times on the scan grid");

    double a = grid[static_cast<std::size_t>(bracket_idx)];
    double b = grid[static_cast<std::size_t>(bracket_idx + 1)];
    double fa = values[static_cast<std::size_t>(bracket_idx)];
    while (b - a > 1e-6) {
        const double mid = 0.5 * (a + b);
        const double fm = diff_at(mid);
        if (fm == 0.0) return mid;
        if ((fa > 0.0) == (fm > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

Winner model2_threshold(double delta0, double p, double q, double mu, Regime regime) {
    if (!(delta0 > 0.0 && delta0 < 1.0))
        throw ValidationError("threshold predicate needs delta0 in (0,1)");
    if (!(mu >= 0.0 && mu <= 1.0) || !(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
        throw ValidationError("threshold predicate needs probabilities in [0,1]");
    if (regime == Regime::LongHorizon) return Winner::SLast;
    if (!(mu > 0.5)) return Winner::SLast;
    const double tie_p = delta0 * delta0 * q / (1.0 - delta0 * delta0);
    if (std::abs(p - tie_p) <= 1e-12) return Winner::Tie;
    if (p < tie_p) {
        const double denom = 2.0 * delta0 * delta0 - p / (p + q);
        if (denom > 0.0 && mu > delta0 * delta0 / denom) return Winner::SFirst;
    }
    return Winner::SLast;
}

Winner small_horizon_winner(const BehaviorSpec& behavior, const InfluenceSpec& influence,
                            double delta0) {
    behavior.validate();
    influence.validate();
    const DriftPoly drift = natural_drift(behavior);
    const double fp = influence.fixed_point();
    const double score =
        drift.a2 * (delta0 * delta0 - 2.0 * fp * delta0) - drift.a0 - fp * drift.a1;
    if (score > 0.0) return Winner::SFirst;
    if (score < 0.0) return Winner::SLast;
    return Winner::Tie;
}

}  // namespace opinion
