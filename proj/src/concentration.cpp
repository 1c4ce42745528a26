#include "opinion/concentration.hpp"

#include <cmath>
#include <string>

namespace opinion {

namespace {

void require_pq_equal_last(const SimConfig& config, const char* what) {
    if (!config.behavior.is_hybrid_sc())
        throw ModelMismatch(std::string(what) + " covers the strong/conformist hybrid only");
    if (std::abs(config.behavior.p - config.behavior.q) > 1e-12)
        throw ModelMismatch(std::string(what) + " needs p == q");
    if (!config.schedule.is_last_slots())
        throw ConfigMismatch(std::string(what) + " needs the influence-last schedule");
}

}  // namespace

ConcentrationParams make_concentration_params(const SimConfig& config, double epsilon1,
                                              double epsilon2) {
    config.validate();
    require_pq_equal_last(config, "the concentration bound");
    if (!(epsilon1 > 0.0) || !(epsilon2 > 0.0))
        throw ValidationError("concentration epsilons must be positive");
    ConcentrationParams params;
    const double M = static_cast<double>(config.M);
    params.r_tilde = 1.0 - (config.influence.p_tilde + config.influence.q_tilde) / M;
    params.r = 1.0 - 2.0 * config.behavior.mix * config.behavior.p / M;
    params.epsilon1 = epsilon1;
    params.epsilon2 = epsilon2;
    params.T = config.T;
    params.b = config.budget_fraction();
    return params;
}

AzumaBounds azuma_bounds(const ConcentrationParams& params) {
    const double T = static_cast<double>(params.T);
    const double rt_pow_T = std::pow(params.r_tilde, T);
    const double r_pow_T = std::pow(params.r, T);
    AzumaBounds out;
    out.mu1 = std::exp(-rt_pow_T * params.epsilon1 * params.epsilon1 /
                       (2.0 * params.b * T * (1.0 + params.r_tilde)));
    out.mu2 = std::exp(-r_pow_T * params.epsilon2 * params.epsilon2 /
                       (2.0 * (1.0 - params.b) * T * (1.0 + params.r)));
    out.combined_failure = 2.0 * out.mu1 + 2.0 * out.mu2;
    out.combined_epsilon = rt_pow_T * params.epsilon1 +
                           std::pow(params.r, (1.0 - params.b) * T) * params.epsilon2;
    return out;
}

double approx_solution(const SimConfig& config) {
    config.validate();
    require_pq_equal_last(config, "the approximate solution");
    const double M = static_cast<double>(config.M);
    const double n_inf = static_cast<double>(config.schedule.budget());
    const double n_nat = static_cast<double>(config.T - config.schedule.budget());
    const double fp = config.influence.fixed_point();
    const double rt = 1.0 - (config.influence.p_tilde + config.influence.q_tilde) / M;
    const double r = 1.0 - 2.0 * config.behavior.mix * config.behavior.p / M;
    const double rt_pow = std::pow(rt, n_inf);
    const double r_pow = std::pow(r, n_nat);
    return fp + (0.5 - fp) * rt_pow + (config.delta0 - 0.5) * rt_pow * r_pow;
}

std::vector<double> martingale_residuals(const SimConfig& config, std::int64_t t,
                                         MartingaleKind kind) {
    config.validate();
    if (!config.behavior.is_hybrid_sc())
        throw ModelMismatch("compensated processes cover the strong/conformist hybrid only");
    if (t < 0 || t >= config.T) throw PhaseMismatch("slot index outside the horizon");
    const bool influenced = config.schedule.influenced(t);
    if (influenced != (kind == MartingaleKind::InfluencedPhase))
        throw PhaseMismatch("slot " + std::to_string(t) + " is not in the requested phase");

    const double M = static_cast<double>(config.M);
    double contraction, drift_const;
    if (kind == MartingaleKind::InfluencedPhase) {
        contraction = 1.0 - (config.influence.p_tilde + config.influence.q_tilde) / M;
        drift_const = config.influence.p_tilde / M;
    } else {
        contraction = 1.0 - config.behavior.mix * (config.behavior.p + config.behavior.q) / M;
        drift_const = config.behavior.mix * config.behavior.p / M;
    }
    const double scale = std::pow(contraction, -static_cast<double>(t + 1));
    const std::optional<InfluenceSpec> influence =
        influenced ? std::optional<InfluenceSpec>(config.influence) : std::nullopt;

    std::vector<double> residuals(static_cast<std::size_t>(config.M) + 1);
    for (std::int64_t n = 0; n <= config.M; ++n) {
        const double delta = static_cast<double>(n) / M;
        const ChiDistribution chi =
            chi_distribution(delta, effective_rates(config.behavior, influence, delta));
        const double expected_next = delta + (chi.up - chi.down) / M;
        residuals[static_cast<std::size_t>(n)] =
            scale * (expected_next - contraction * delta - drift_const);
    }
    return residuals;
}

double martingale_residual(const SimConfig& config, std::int64_t t, MartingaleKind kind) {
    double worst = 0.0;
    for (double r : martingale_residuals(config, t, kind)) worst = std::max(worst, std::abs(r));
    return worst;
}

ConcentrationReport concentration_check(const SimConfig& config, const EnsembleStats& stats,
                                        double epsilon) {
    config.validate();
    require_pq_equal_last(config, "the concentration check");
    if (!(epsilon > 0.0)) throw ValidationError("concentration epsilon must be positive");
    if (stats.final_deltas.empty())
        throw ConfigMismatch("the ensemble carries no replication finals");

    const double M = static_cast<double>(config.M);
    const double T = static_cast<double>(config.T);
    const double rt = 1.0 - (config.influence.p_tilde + config.influence.q_tilde) / M;
    const double r = 1.0 - 2.0 * config.behavior.mix * config.behavior.p / M;
    const double b = config.budget_fraction();
    // even split of the combined deviation across the two phase bounds
    const double eps1 = 0.5 * epsilon / std::pow(rt, T);
    const double eps2 = 0.5 * epsilon / std::pow(r, (1.0 - b) * T);
    const AzumaBounds bounds = azuma_bounds(make_concentration_params(config, eps1, eps2));

    ConcentrationReport report;
    report.epsilon = epsilon;
    report.empirical_tail = empirical_tail(stats, approx_solution(config), epsilon);
    report.analytic_bound = bounds.combined_failure;
    report.pass = report.empirical_tail <= report.analytic_bound;
    return report;
}

}  // namespace opinion
