#include "opinion/exact_markov.hpp"

#include <cmath>
#include <string>

namespace opinion {

namespace {

// Neumaier compensated sum; the mass checks must not be limited by naive
// accumulation over M+1 entries.
double stable_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

StateDistribution StateDistribution::point_mass(std::int64_t M, std::int64_t N) {
    PopulationState state(M, N);  // validates
    StateDistribution dist;
    dist.M = M;
    dist.probs.assign(static_cast<std::size_t>(M) + 1, 0.0);
    dist.probs[static_cast<std::size_t>(N)] = 1.0;
    return dist;
}

void StateDistribution::validate() const {
    if (M <= 0) throw ValidationError("population size must be positive");
    if (probs.size() != static_cast<std::size_t>(M) + 1)
        throw ValidationError("distribution must have M+1 entries");
    for (double p : probs)
        if (p < 0.0) throw ValidationError("distribution entries must be nonnegative");
    const double mass = stable_sum(probs);
    if (std::abs(mass - 1.0) > 1e-10)
        throw MassLeak("distribution mass " + std::to_string(mass) + " drifted beyond 1e-10");
}

double StateDistribution::mean_delta() const {
    double sum = 0.0, comp = 0.0;
    const double M_d = static_cast<double>(M);
    for (std::size_t n = 0; n < probs.size(); ++n) {
        const double x = probs[n] * (static_cast<double>(n) / M_d);
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

StateDistribution propagate_one_slot(const StateDistribution& dist,
                                     const BehaviorSpec& behavior,
                                     const std::optional<InfluenceSpec>& influence) {
    const std::int64_t M = dist.M;
    const double M_d = static_cast<double>(M);
    StateDistribution next;
    next.M = M;
    next.probs.assign(dist.probs.size(), 0.0);
    for (std::int64_t n = 0; n <= M; ++n) {
        const double mass = dist.probs[static_cast<std::size_t>(n)];
        if (mass == 0.0) continue;
        const double delta = static_cast<double>(n) / M_d;
        const ChiDistribution chi =
            chi_distribution(delta, effective_rates(behavior, influence, delta));
        // boundary rates vanish through the delta / (1-delta) factors
        if (n > 0) next.probs[static_cast<std::size_t>(n - 1)] += mass * chi.down;
        next.probs[static_cast<std::size_t>(n)] += mass * chi.stay;
        if (n < M) next.probs[static_cast<std::size_t>(n + 1)] += mass * chi.up;
    }
    const double before = stable_sum(dist.probs);
    const double after = stable_sum(next.probs);
    if (std::abs(after - before) > 1e-12)
        throw MassLeak("one-slot propagation leaked mass " + std::to_string(after - before));
    return next;
}

namespace {

void check_caps(const SimConfig& config, const MarkovCaps& caps) {
    if (config.M > caps.max_population)
        throw CostCapExceeded("population " + std::to_string(config.M) +
                              " exceeds exact-propagation cap " +
                              std::to_string(caps.max_population));
    if (config.T > caps.max_horizon)
        throw CostCapExceeded("horizon " + std::to_string(config.T) +
                              " exceeds exact-propagation cap " +
                              std::to_string(caps.max_horizon));
}

}  // namespace

Trajectory exact_expected_trajectory(const SimConfig& config, const MarkovCaps& caps) {
    config.validate();
    check_caps(config, caps);
    StateDistribution dist = StateDistribution::point_mass(config.M, config.initial_no_count());
    Trajectory traj;
    traj.source = TrajectorySource::ExactMarkov;
    traj.times.reserve(static_cast<std::size_t>(config.T) + 1);
    traj.values.reserve(static_cast<std::size_t>(config.T) + 1);
    traj.times.push_back(0);
    traj.values.push_back(dist.mean_delta());
    for (std::int64_t t = 0; t < config.T; ++t) {
        const std::optional<InfluenceSpec> influence =
            config.schedule.influenced(t) ? std::optional<InfluenceSpec>(config.influence)
                                          : std::nullopt;
        dist = propagate_one_slot(dist, config.behavior, influence);
        traj.times.push_back(t + 1);
        traj.values.push_back(dist.mean_delta());
    }
    return traj;
}

double exact_final_expectation(const SimConfig& config, const MarkovCaps& caps) {
    config.validate();
    check_caps(config, caps);
    StateDistribution dist = StateDistribution::point_mass(config.M, config.initial_no_count());
    for (std::int64_t t = 0; t < config.T; ++t) {
        const std::optional<InfluenceSpec> influence =
            config.schedule.influenced(t) ? std::optional<InfluenceSpec>(config.influence)
                                          : std::nullopt;
        dist = propagate_one_slot(dist, config.behavior, influence);
    }
    return 1.0 - dist.mean_delta();
}

}  // namespace opinion
