#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opinion/io.hpp"

namespace opinion {

enum class ExperimentKind {
    Simulate,
    Ode,
    Compare,
    Crossover,
    Bruteforce,
    Concentration,
    ReproduceFig,
};

ExperimentKind experiment_kind_from_name(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

enum class SweepAxis { None, Lambda, Mu };

struct SweepSpec {
    SweepAxis axis = SweepAxis::None;
    std::vector<double> grid;  // finite, strictly increasing, within [0,1]
};

struct ExperimentCaps {
    std::int64_t max_states = 2000;     // exact-propagation population cap
    std::int64_t max_horizon = 100000;  // exact-propagation horizon cap
    std::int64_t max_schedules = 100000;
    std::int64_t max_steps = 50000000;

    MarkovCaps markov() const { return MarkovCaps{max_states, max_horizon}; }
    IntegrateOptions integrate() const {
        IntegrateOptions opts;
        opts.max_total_steps = max_steps;
        return opts;
    }
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    std::optional<int> figure;  // ReproduceFig only, 1..5
    SimConfig sim;
    Strategy strategy = Strategy::Last;  // named-schedule runs
    SweepSpec sweep;
    DiffMethod compare_method = DiffMethod::ClosedForm;
    std::int64_t n_reps = 100;
    std::uint64_t base_seed = 0;
    double epsilon = 0.1;  // concentration deviation
    std::int64_t record_every = 1;
    std::string out_path;
    OutputFormat format = OutputFormat::Csv;
    ExperimentCaps caps;

    void validate() const;
};

// Strict parse: unknown keys are errors, every value is range-checked.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

// Parameter presets for the five figure-reproduction runs, transcribed from
// the captions; delta0 and the replication counts are repo defaults (the
// captions do not state them).
ExperimentConfig figure_preset(int figure);

// Execute the experiment and write its artifact to config.out_path.
// Artifacts are rendered fully in memory first, so a failing run leaves no
// partial file behind.
void run_experiment(const ExperimentConfig& config);

// Rendered artifact of an experiment, for tests and in-process callers.
std::string render_experiment(const ExperimentConfig& config);

}  // namespace opinion
