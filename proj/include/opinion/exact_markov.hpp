#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opinion/mc_sim.hpp"

namespace opinion {

// Law of N(t) over {0..M}. Entries must be nonnegative and sum to one
// within 1e-10; larger drift is an error rather than a silent renormalize.
struct StateDistribution {
    std::int64_t M = 1;
    std::vector<double> probs;

    static StateDistribution point_mass(std::int64_t M, std::int64_t N);
    void validate() const;
    double mean_delta() const;
};

struct MarkovCaps {
    std::int64_t max_population = 2000;
    std::int64_t max_horizon = 100000;
};

// One application of the tridiagonal one-slot kernel. Conserves mass to
// 1e-12 per step (MassLeak otherwise).
StateDistribution propagate_one_slot(const StateDistribution& dist,
                                     const BehaviorSpec& behavior,
                                     const std::optional<InfluenceSpec>& influence);

// Exact E[delta_N(t)] for t = 0..T by distribution propagation.
Trajectory exact_expected_trajectory(const SimConfig& config, const MarkovCaps& caps = {});

// E[Y(T)]/M = 1 - E[delta_N(T)], the objective a schedule is judged by.
double exact_final_expectation(const SimConfig& config, const MarkovCaps& caps = {});

}  // namespace opinion
