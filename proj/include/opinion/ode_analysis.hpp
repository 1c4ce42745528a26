#pragma once

#include <optional>

#include "opinion/exact_markov.hpp"
#include "opinion/mc_sim.hpp"

namespace opinion {

enum class Strategy { First, Last };

// Horizon regimes used by the asymptotic results: LongHorizon means the
// horizon dwarfs the population (T >> M, nearly everyone is reached),
// ShortHorizon the opposite (T << M, almost nobody is reached).
enum class Regime { LongHorizon, ShortHorizon };

enum class CaseTag { PGreaterQ, PLessQ, Degenerate };

// Roots of the natural-phase quadratic for the strong/conformist hybrid.
// Non-degenerate invariants: p > q gives a1 in (0,1], a2 <= 0; p < q gives
// a1 >= 1, a2 in [0, p/(p+q)]; always a1 > a2.
struct QuadraticRoots {
    double a1 = 0.0;
    double a2 = 0.0;
    double discriminant = 0.0;  // of the 1/M-scaled quadratic
    CaseTag case_tag = CaseTag::Degenerate;
};

QuadraticRoots quadratic_roots(const BehaviorSpec& behavior, double M);

enum class Winner { SLast, SFirst, Tie };
enum class DiffMethod { ClosedForm, OdeNumeric, ExactMarkov, MonteCarlo };

// Winner convention: the strategy with the smaller final fraction of "No"
// wins; `difference` = final(last) - final(first), so negative means the
// influence-last schedule wins.
Winner winner_from_difference(double difference, double tolerance);

struct ClosedFormAux {
    double rate = 0.0;  // natural-phase log-ratio decay rate
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

struct StrategyDiffReport {
    double delta_last_final = 0.0;
    double delta_first_final = 0.0;
    double difference = 0.0;  // delta_last_final - delta_first_final
    Winner winner = Winner::Tie;
    DiffMethod method = DiffMethod::ClosedForm;
    double tie_tolerance = 1e-9;
    std::optional<double> diff_stderr;  // MonteCarlo only
    std::optional<ClosedFormAux> aux;   // ClosedForm only
};

// Mean-field right-hand side, d(delta)/dt = [(1-delta) p_t - delta q_t] / M.
double ode_rhs(const BehaviorSpec& behavior, const std::optional<InfluenceSpec>& influence,
               double delta, double M);

struct IntegrateOptions {
    // Fixed-step RK4 resolution: steps per unit of dimensionless time
    // (phase Lipschitz rate x duration). Calibrated against the linear-case
    // closed forms to keep the error under 1e-8.
    double steps_per_unit = 96.0;
    std::int64_t min_steps_per_phase = 16;
    std::int64_t max_total_steps = 50'000'000;
};

// Fixed-step RK4 over the schedule's maximal constant-influence intervals,
// recording delta at every slot.
Trajectory integrate(const SimConfig& config, const IntegrateOptions& opts = {});

// Same integration, final value only; long phases use phase-level steps
// instead of slot-level ones.
double integrate_final_delta(const SimConfig& config, const IntegrateOptions& opts = {});

// delta after `duration` influenced slots:
// fp + (delta_start - fp) e^{-duration (p~+q~)/M}, fp = p~/(p~+q~).
double closed_form_influence_phase(double delta_start, const InfluenceSpec& influence,
                                   double duration, double M);

// Closed-form final fractions for the strong/conformist hybrid with p == q.
double closed_form_final_pq_equal(const SimConfig& config, Strategy strategy);
StrategyDiffReport strategy_diff_pq_equal(const SimConfig& config);

// Closed-form final fractions for the strong/conformist hybrid with p != q
// (logistic two-root solution in the natural phase).
double closed_form_final_general(const SimConfig& config, Strategy strategy);
StrategyDiffReport strategy_diff_general(const SimConfig& config);

// Dispatcher: routes degenerate parameters (|p-q| <= 1e-9 or 1-mix <= 1e-9)
// to the linear closed forms, everything else to the general ones.
double closed_form_final(const SimConfig& config, Strategy strategy);
StrategyDiffReport strategy_diff_closed_form(const SimConfig& config);

// The same comparison evaluated by other engines.
StrategyDiffReport strategy_diff_ode(const SimConfig& config, const IntegrateOptions& opts = {});
StrategyDiffReport strategy_diff_exact(const SimConfig& config, const MarkovCaps& caps = {});
StrategyDiffReport strategy_diff_mc(const SimConfig& config, std::int64_t n_reps,
                                    std::uint64_t base_seed, int threads = 0);

// Leading-order approximations of the closed-form difference in the two
// horizon regimes. Diagnostic only: useful for checking the sign structure,
// not as a primary estimate.
double asymptotic_diff(const SimConfig& config, Regime regime);

// Mixing value at which the first/last comparison changes sign, found by
// scanning a lambda grid and bisecting the unique bracket to 1e-6 width.
// nullopt when the difference has constant sign on the grid.
std::optional<double> crossover_lambda(const SimConfig& config_template,
                                       int grid_points = 1000);

// Threshold predicate for the conformist/rebel hybrid: who wins as a
// function of (delta0, p, q, mu). Short-horizon regime only; the long
// horizon always favors influencing last under this predicate.
Winner model2_threshold(double delta0, double p, double q, double mu,
                        Regime regime = Regime::ShortHorizon);

// Short-horizon (T << M) limit of the mean-field comparison, valid for any
// behavior with polynomial drift a2 d^2 + a1 d + a0: the sign of
// a2 (d0^2 - 2 fp d0) - a0 - fp a1 decides the winner, fp being the
// influenced fixed point. Derived by expanding the phase maps to second
// order in T/M; used as an independent cross-check of threshold predicates.
Winner small_horizon_winner(const BehaviorSpec& behavior, const InfluenceSpec& influence,
                            double delta0);

}  // namespace opinion
