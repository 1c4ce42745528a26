#pragma once

#include <cstdint>
#include <vector>

#include "opinion/mc_sim.hpp"

namespace opinion {

// Inputs of the two-phase tail bounds for the p == q strong/conformist
// hybrid under the influence-last schedule:
//   r~ = 1 - (p~+q~)/M   one-slot mean contraction of an influenced slot
//   r  = 1 - 2 lambda p / M   same for a natural slot
struct ConcentrationParams {
    double r_tilde = 1.0;
    double r = 1.0;
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    std::int64_t T = 0;
    double b = 0.0;  // exact budget fraction budget/T
};

ConcentrationParams make_concentration_params(const SimConfig& config, double epsilon1,
                                              double epsilon2);

struct AzumaBounds {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double combined_failure = 0.0;  // 2 mu1 + 2 mu2
    // deviation the two bounds control together: r~^T eps1 + r^{(1-b)T} eps2
    double combined_epsilon = 0.0;
};

AzumaBounds azuma_bounds(const ConcentrationParams& params);

// Product-form approximation of the final "No" fraction for the p == q
// hybrid under the influence-last schedule (per-slot contractions instead
// of exponentials).
double approx_solution(const SimConfig& config);

// Which compensated process a residual refers to: the influenced-phase one
// (contraction r~) or the natural-phase one (contraction r).
enum class MartingaleKind { InfluencedPhase, NaturalPhase };

// E[Z(t+1) | N(t) = n] - Z(t) for every state n, where Z is the compensated
// process of the requested kind. Zero for a martingale; the natural-phase
// process drifts by r^{-(t+1)} (1-lambda)(p-q) delta (1-delta) / M, so for
// p > q it is a submartingale (nonnegative residuals) and for p < q a
// supermartingale.
std::vector<double> martingale_residuals(const SimConfig& config, std::int64_t t,
                                         MartingaleKind kind);

// Largest absolute residual over the state space.
double martingale_residual(const SimConfig& config, std::int64_t t, MartingaleKind kind);

struct ConcentrationReport {
    double epsilon = 0.0;
    double empirical_tail = 0.0;
    double analytic_bound = 0.0;
    bool pass = false;
};

// Splits epsilon evenly across the two phases (eps1' = eps2' = eps/2),
// evaluates the bounds and compares them with the ensemble tail around the
// approximate solution.
ConcentrationReport concentration_check(const SimConfig& config, const EnsembleStats& stats,
                                        double epsilon);

}  // namespace opinion
