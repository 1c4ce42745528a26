#pragma once

#include <cstdint>
#include <vector>

#include "opinion/core_model.hpp"

namespace opinion {

enum class TrajectorySource { MonteCarlo, ExactMarkov, OdeNumeric, ClosedForm };

struct Trajectory {
    std::vector<std::int64_t> times;
    std::vector<double> values;  // fraction of "No" per recorded slot
    TrajectorySource source = TrajectorySource::MonteCarlo;

    double final_value() const { return values.back(); }
};

// Keep every `every`-th point plus t=0, the given anchors and t=T.
Trajectory decimate(const Trajectory& traj, std::int64_t every,
                    const std::vector<std::int64_t>& anchors = {});

struct SimConfig {
    std::int64_t M = 1;
    std::int64_t T = 0;
    BehaviorSpec behavior;
    InfluenceSpec influence;
    double delta0 = 0.0;
    Schedule schedule;
    // Fidelity mode: draw the per-slot type instead of mixing the hybrid
    // rates in expectation. Identical one-step law, noisier path.
    bool sample_type_per_slot = false;

    void validate() const;
    // N(0) = round(delta0 * M), ties away from zero.
    std::int64_t initial_no_count() const;
    // Exact budget fraction of the schedule.
    double budget_fraction() const {
        return static_cast<double>(schedule.budget()) / static_cast<double>(T);
    }
};

struct EnsembleStats {
    std::int64_t n_reps = 0;
    double mean_final_delta = 0.0;
    double std_final_delta = 0.0;  // sample standard deviation, 0 for n_reps == 1
    std::vector<double> mean_trajectory;
    std::vector<double> final_deltas;  // per replication, by replication index

    double stderr_final() const;
};

// SplitMix64-style mixer; replication r of a run with base seed s uses
// mix64(s + r * 0x9E3779B97F4A7C15). Documented so runs can be reproduced
// and replications executed in any order or in parallel.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication);

// One exact realization of N(t+1) = N(t) + chi(t+1) over the schedule.
// Deterministic in (config, seed).
Trajectory simulate_once(const SimConfig& config, std::uint64_t seed);

// Independent replications with per-replication seeds derived from
// base_seed. Aggregation is done in replication-index order regardless of
// execution order, so results do not depend on the thread count.
EnsembleStats simulate_ensemble(const SimConfig& config, std::int64_t n_reps,
                                std::uint64_t base_seed, int threads = 0);

// Fraction of replications whose final value deviates from `center` by more
// than `epsilon`.
double empirical_tail(const EnsembleStats& stats, double center, double epsilon);

}  // namespace opinion
