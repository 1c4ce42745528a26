#include "opinion/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace opinion {

using nlohmann::json;

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "simulate") return ExperimentKind::Simulate;
    if (name == "ode") return ExperimentKind::Ode;
    if (name == "compare") return ExperimentKind::Compare;
    if (name == "crossover") return ExperimentKind::Crossover;
    if (name == "bruteforce") return ExperimentKind::Bruteforce;
    if (name == "concentration") return ExperimentKind::Concentration;
    if (name == "reproduce-fig") return ExperimentKind::ReproduceFig;
    throw ValidationError("unknown experiment kind '" + name + "'");
}

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Ode: return "ode";
        case ExperimentKind::Compare: return "compare";
        case ExperimentKind::Crossover: return "crossover";
        case ExperimentKind::Bruteforce: return "bruteforce";
        case ExperimentKind::Concentration: return "concentration";
        case ExperimentKind::ReproduceFig: return "reproduce-fig";
    }
    return "simulate";
}

void ExperimentConfig::validate() const {
    sim.validate();
    if (kind == ExperimentKind::ReproduceFig) {
        if (!figure || *figure < 1 || *figure > 5)
            throw ValidationError("figure reproduction needs a figure index in 1..5");
    }
    if (sweep.axis != SweepAxis::None) {
        if (sweep.grid.empty()) throw ValidationError("sweep grid must be non-empty");
        for (double v : sweep.grid)
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("sweep grid values must lie in [0,1]");
        for (std::size_t i = 1; i < sweep.grid.size(); ++i)
            if (!(sweep.grid[i] > sweep.grid[i - 1]))
                throw ValidationError("sweep grid must be strictly increasing");
    }
    if (n_reps < 1) throw ValidationError("n_reps must be at least 1");
    if (record_every < 1) throw ValidationError("record_every must be at least 1");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
}

namespace {

// Consume-tracking wrapper so unknown keys become hard errors.
class StrictObject {
public:
    explicit StrictObject(const json& j, std::string context)
        : obj_(j), context_(std::move(context)) {
        if (!j.is_object()) throw ValidationError(context_ + " must be a JSON object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key);
    }

    template <typename T>
    T require(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) throw ValidationError(context_ + " is missing key '" + key + "'");
        return get<T>(key);
    }

    template <typename T>
    T value_or(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        return get<T>(key);
    }

    json raw(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key()))
                throw ValidationError(context_ + " has unknown key '" + it.key() + "'");
        }
    }

private:
    template <typename T>
    T get(const std::string& key) {
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ValidationError(context_ + " key '" + key + "': " + e.what());
        }
    }

    const json& obj_;
    std::string context_;
    std::set<std::string> seen_;
};

BehaviorSpec parse_behavior(const json& j) {
    StrictObject o(j, "behavior");
    const std::string kind = o.require<std::string>("kind");
    const double p = o.require<double>("p");
    const double q = o.require<double>("q");
    const double mix = o.value_or<double>("mix", 0.0);
    o.finish();
    if (kind == "pure-s") return BehaviorSpec::pure_s(p, q);
    if (kind == "pure-c") return BehaviorSpec::pure_c(p, q);
    if (kind == "pure-r") return BehaviorSpec::pure_r(p, q);
    if (kind == "hybrid-sc") return BehaviorSpec::hybrid_sc(p, q, mix);
    if (kind == "hybrid-cr") return BehaviorSpec::hybrid_cr(p, q, mix);
    throw ValidationError("unknown behavior kind '" + kind + "'");
}

InfluenceSpec parse_influence(const json& j) {
    StrictObject o(j, "influence");
    InfluenceSpec spec(o.require<double>("p_tilde"), o.require<double>("q_tilde"));
    o.finish();
    return spec;
}

std::vector<double> parse_grid(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    StrictObject o(j, "sweep grid");
    const double start = o.require<double>("start");
    const double stop = o.require<double>("stop");
    const std::int64_t count = o.require<std::int64_t>("count");
    o.finish();
    if (count < 2) throw ValidationError("sweep grid count must be at least 2");
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] =
            start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return grid;
}

SweepSpec parse_sweep(const json& j) {
    StrictObject o(j, "sweep");
    const std::string axis = o.require<std::string>("axis");
    SweepSpec sweep;
    if (axis == "none") {
        sweep.axis = SweepAxis::None;
    } else if (axis == "lambda") {
        sweep.axis = SweepAxis::Lambda;
    } else if (axis == "mu") {
        sweep.axis = SweepAxis::Mu;
    } else {
        throw ValidationError("unknown sweep axis '" + axis + "'");
    }
    if (sweep.axis != SweepAxis::None) sweep.grid = parse_grid(o.raw("grid"));
    o.finish();
    return sweep;
}

ExperimentCaps parse_caps(const json& j) {
    StrictObject o(j, "caps");
    ExperimentCaps caps;
    caps.max_states = o.value_or<std::int64_t>("max_states", caps.max_states);
    caps.max_horizon = o.value_or<std::int64_t>("max_horizon", caps.max_horizon);
    caps.max_schedules = o.value_or<std::int64_t>("max_schedules", caps.max_schedules);
    caps.max_steps = o.value_or<std::int64_t>("max_steps", caps.max_steps);
    o.finish();
    return caps;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
    StrictObject o(j, "config");
    const int version = o.require<int>("schema_version");
    if (version != 1) throw ValidationError("unsupported schema_version " + std::to_string(version));

    ExperimentConfig config;
    config.kind = experiment_kind_from_name(o.require<std::string>("experiment"));
    if (o.has("figure")) config.figure = o.require<int>("figure");

    config.sim.M = o.require<std::int64_t>("M");
    config.sim.T = o.require<std::int64_t>("T");
    config.sim.delta0 = o.require<double>("delta0");
    config.sim.behavior = parse_behavior(o.raw("behavior"));
    config.sim.influence = parse_influence(o.raw("influence"));
    config.sim.sample_type_per_slot = o.value_or<bool>("sample_type_per_slot", false);

    std::int64_t budget = 0;
    if (o.has("budget")) {
        budget = o.require<std::int64_t>("budget");
        if (budget < 0 || budget > config.sim.T)
            throw ValidationError("budget must lie in [0, T]");
    } else {
        const double b = o.require<double>("b");
        if (!(b > 0.0 && b <= 1.0)) throw ValidationError("b must lie in (0,1]");
        budget = static_cast<std::int64_t>(std::floor(b * static_cast<double>(config.sim.T)));
    }

    std::string schedule = o.value_or<std::string>("schedule", "last");
    if (schedule == "first") {
        config.strategy = Strategy::First;
        config.sim.schedule = Schedule::first_slots(config.sim.T, budget);
    } else if (schedule == "last") {
        config.strategy = Strategy::Last;
        config.sim.schedule = Schedule::last_slots(config.sim.T, budget);
    } else {
        throw ValidationError("schedule must be 'first' or 'last'");
    }

    if (o.has("sweep")) config.sweep = parse_sweep(o.raw("sweep"));
    if (o.has("method")) config.compare_method = method_from_name(o.require<std::string>("method"));
    config.n_reps = o.value_or<std::int64_t>("n_reps", config.n_reps);
    config.base_seed = o.value_or<std::uint64_t>("base_seed", config.base_seed);
    config.epsilon = o.value_or<double>("epsilon", config.epsilon);
    config.record_every = o.value_or<std::int64_t>("record_every", config.record_every);
    config.out_path = o.value_or<std::string>("out", config.out_path);
    if (o.has("format")) config.format = parse_output_format(o.require<std::string>("format"));
    if (o.has("caps")) config.caps = parse_caps(o.raw("caps"));
    o.finish();
    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config file does not parse as JSON: ") + e.what());
    }
    return parse_experiment_config(j);
}

namespace {

std::vector<double> default_mix_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
    return grid;
}

}  // namespace

ExperimentConfig figure_preset(int figure) {
    ExperimentConfig config;
    config.kind = ExperimentKind::ReproduceFig;
    config.figure = figure;
    config.base_seed = 20260809;
    config.sim.delta0 = 0.5;
    config.sim.influence = InfluenceSpec(0.1, 0.9);
    config.format = OutputFormat::Csv;
    switch (figure) {
        case 1:
            config.sim.M = 100;
            config.sim.T = 10000;
            config.sim.behavior = BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5);
            config.n_reps = 1;
            break;
        case 2:
            config.sim.M = 10000;
            config.sim.T = 10000;
            config.sim.behavior = BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5);
            config.sweep = SweepSpec{SweepAxis::Lambda, default_mix_grid()};
            config.n_reps = 100;
            break;
        case 3:
            config.sim.M = 1000;
            config.sim.T = 1000;
            config.sim.behavior = BehaviorSpec::hybrid_sc(0.8, 0.4, 0.5);
            config.sweep = SweepSpec{SweepAxis::Lambda, default_mix_grid()};
            config.n_reps = 100;
            break;
        case 4:
            config.sim.M = 1000;
            config.sim.T = 100000;
            config.sim.behavior = BehaviorSpec::hybrid_sc(0.4, 0.8, 0.5);
            config.sweep = SweepSpec{SweepAxis::Lambda, default_mix_grid()};
            config.n_reps = 50;
            break;
        case 5:
            config.sim.M = 1000;
            config.sim.T = 1000;
            config.sim.behavior = BehaviorSpec::hybrid_cr(0.2, 0.9, 0.5);
            config.sweep = SweepSpec{SweepAxis::Mu, default_mix_grid()};
            config.n_reps = 100;
            break;
        default:
            throw ValidationError("figure index must lie in 1..5");
    }
    config.sim.schedule = Schedule::last_fraction(config.sim.T, 0.4);
    return config;
}

namespace {

SimConfig with_mix(const SimConfig& sim, SweepAxis axis, double value) {
    SimConfig out = sim;
    if (axis != SweepAxis::None) out.behavior.mix = value;
    return out;
}

SimConfig with_strategy_schedule(const SimConfig& sim, Strategy strategy) {
    SimConfig out = sim;
    out.schedule = strategy == Strategy::First
                       ? Schedule::first_slots(sim.T, sim.schedule.budget())
                       : Schedule::last_slots(sim.T, sim.schedule.budget());
    return out;
}

StrategyDiffReport compare_with_method(const ExperimentConfig& config, const SimConfig& sim) {
    switch (config.compare_method) {
        case DiffMethod::ClosedForm:
            return strategy_diff_closed_form(sim);
        case DiffMethod::OdeNumeric:
            return strategy_diff_ode(sim, config.caps.integrate());
        case DiffMethod::ExactMarkov:
            return strategy_diff_exact(sim, config.caps.markov());
        case DiffMethod::MonteCarlo:
            return strategy_diff_mc(sim, config.n_reps, config.base_seed);
    }
    throw ValidationError("unknown comparison method");
}

std::string sweep_axis_name(SweepAxis axis) {
    return axis == SweepAxis::Mu ? "mu" : "lambda";
}

std::string render_simulate(const ExperimentConfig& config) {
    std::ostringstream os;
    if (config.n_reps == 1) {
        Trajectory traj = simulate_once(config.sim, replication_seed(config.base_seed, 0));
        traj = decimate(traj, config.record_every,
                        {config.sim.T - config.sim.schedule.budget(), config.sim.schedule.budget()});
        if (config.format == OutputFormat::Csv)
            write_trajectory_csv(os, traj);
        else
            os << to_json(traj).dump(2) << "\n";
        return os.str();
    }
    const EnsembleStats stats = simulate_ensemble(config.sim, config.n_reps, config.base_seed);
    if (config.format == OutputFormat::Csv) {
        Trajectory mean;
        mean.source = TrajectorySource::MonteCarlo;
        mean.values = stats.mean_trajectory;
        mean.times.resize(mean.values.size());
        for (std::size_t i = 0; i < mean.times.size(); ++i)
            mean.times[i] = static_cast<std::int64_t>(i);
        write_trajectory_csv(os, decimate(mean, config.record_every,
                                          {config.sim.schedule.budget(),
                                           config.sim.T - config.sim.schedule.budget()}));
    } else {
        json j{{"schema_version", 1},
               {"n_reps", stats.n_reps},
               {"mean_final_delta", stats.mean_final_delta},
               {"std_final_delta", stats.std_final_delta},
               {"final_deltas", stats.final_deltas}};
        os << j.dump(2) << "\n";
    }
    return os.str();
}

std::string render_ode(const ExperimentConfig& config) {
    std::ostringstream os;
    Trajectory traj = integrate(config.sim, config.caps.integrate());
    traj = decimate(traj, config.record_every,
                    {config.sim.schedule.budget(), config.sim.T - config.sim.schedule.budget()});
    if (config.format == OutputFormat::Csv)
        write_trajectory_csv(os, traj);
    else
        os << to_json(traj).dump(2) << "\n";
    return os.str();
}

std::string render_compare(const ExperimentConfig& config) {
    std::ostringstream os;
    if (config.sweep.axis == SweepAxis::None) {
        const StrategyDiffReport report = compare_with_method(config, config.sim);
        if (config.format == OutputFormat::Csv)
            write_report_csv(os, report);
        else
            os << to_json(report).dump(2) << "\n";
        return os.str();
    }
    std::vector<StrategyDiffReport> reports;
    reports.reserve(config.sweep.grid.size());
    for (double value : config.sweep.grid)
        reports.push_back(
            compare_with_method(config, with_mix(config.sim, config.sweep.axis, value)));
    if (config.format == OutputFormat::Csv) {
        write_sweep_header(os, sweep_axis_name(config.sweep.axis));
        for (std::size_t i = 0; i < reports.size(); ++i)
            write_sweep_row(os, config.sweep.grid[i], reports[i]);
    } else {
        json rows = json::array();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            json row = to_json(reports[i]);
            row[sweep_axis_name(config.sweep.axis)] = config.sweep.grid[i];
            rows.push_back(row);
        }
        os << json{{"schema_version", 1}, {"rows", rows}}.dump(2) << "\n";
    }
    return os.str();
}

std::string render_crossover(const ExperimentConfig& config) {
    std::ostringstream os;
    const std::optional<double> lambda_star = crossover_lambda(config.sim);
    if (config.format == OutputFormat::Csv) {
        os << "lambda_star\n" << (lambda_star ? format_value(*lambda_star) : "none") << "\n";
    } else {
        json j{{"schema_version", 1}};
        if (lambda_star)
            j["lambda_star"] = *lambda_star;
        else
            j["lambda_star"] = nullptr;
        os << j.dump(2) << "\n";
    }
    return os.str();
}

std::string render_bruteforce(const ExperimentConfig& config) {
    std::ostringstream os;
    const ScheduleSearchResult result =
        best_schedule_exact(config.sim, config.caps.markov(), config.caps.max_schedules);
    if (config.format == OutputFormat::Csv)
        write_search_result_csv(os, result);
    else
        os << to_json(result).dump(2) << "\n";
    return os.str();
}

std::string render_concentration(const ExperimentConfig& config) {
    std::ostringstream os;
    const EnsembleStats stats = simulate_ensemble(config.sim, config.n_reps, config.base_seed);
    const ConcentrationReport report = concentration_check(config.sim, stats, config.epsilon);
    if (config.format == OutputFormat::Csv)
        write_concentration_csv(os, report);
    else
        os << to_json(report).dump(2) << "\n";
    return os.str();
}

std::string render_figure(const ExperimentConfig& config) {
    std::ostringstream os;
    const int figure = config.figure.value();
    if (figure == 1) {
        const SimConfig sim_last = with_strategy_schedule(config.sim, Strategy::Last);
        const SimConfig sim_first = with_strategy_schedule(config.sim, Strategy::First);
        const Trajectory ode_last = integrate(sim_last, config.caps.integrate());
        const Trajectory ode_first = integrate(sim_first, config.caps.integrate());
        const Trajectory mc_last =
            simulate_once(sim_last, replication_seed(mix64(config.base_seed ^ 0x4CULL), 0));
        const Trajectory mc_first =
            simulate_once(sim_first, replication_seed(mix64(config.base_seed ^ 0x46ULL), 0));
        os << "t,ode_delta_SL,ode_delta_SF,mc_delta_SL,mc_delta_SF\n";
        for (std::size_t i = 0; i < ode_last.values.size(); ++i) {
            const std::int64_t t = ode_last.times[i];
            if (t % config.record_every != 0 && t != config.sim.T) continue;
            os << t << "," << format_value(ode_last.values[i]) << ","
               << format_value(ode_first.values[i]) << "," << format_value(mc_last.values[i])
               << "," << format_value(mc_first.values[i]) << "\n";
        }
        return os.str();
    }

    os << sweep_axis_name(config.sweep.axis) << ",mean_yes_SL,mean_yes_SF,ode_yes_SL,ode_yes_SF\n";
    for (double value : config.sweep.grid) {
        const SimConfig swept = with_mix(config.sim, config.sweep.axis, value);
        const SimConfig sim_last = with_strategy_schedule(swept, Strategy::Last);
        const SimConfig sim_first = with_strategy_schedule(swept, Strategy::First);
        const EnsembleStats mc_last = simulate_ensemble(
            sim_last, config.n_reps, mix64(config.base_seed ^ 0x4CULL));
        const EnsembleStats mc_first = simulate_ensemble(
            sim_first, config.n_reps, mix64(config.base_seed ^ 0x46ULL));
        double ode_last_delta, ode_first_delta;
        if (swept.behavior.is_hybrid_sc()) {
            ode_last_delta = closed_form_final(sim_last, Strategy::Last);
            ode_first_delta = closed_form_final(sim_first, Strategy::First);
        } else {
            ode_last_delta = integrate_final_delta(sim_last, config.caps.integrate());
            ode_first_delta = integrate_final_delta(sim_first, config.caps.integrate());
        }
        os << format_value(value) << "," << format_value(1.0 - mc_last.mean_final_delta) << ","
           << format_value(1.0 - mc_first.mean_final_delta) << ","
           << format_value(1.0 - ode_last_delta) << "," << format_value(1.0 - ode_first_delta)
           << "\n";
    }
    return os.str();
}

}  // namespace

std::string render_experiment(const ExperimentConfig& config) {
    config.validate();
    switch (config.kind) {
        case ExperimentKind::Simulate: return render_simulate(config);
        case ExperimentKind::Ode: return render_ode(config);
        case ExperimentKind::Compare: return render_compare(config);
        case ExperimentKind::Crossover: return render_crossover(config);
        case ExperimentKind::Bruteforce: return render_bruteforce(config);
        case ExperimentKind::Concentration: return render_concentration(config);
        case ExperimentKind::ReproduceFig: return render_figure(config);
    }
    throw ValidationError("unknown experiment kind");
}

void run_experiment(const ExperimentConfig& config) {
    if (config.out_path.empty()) throw ValidationError("experiment needs an output path");
    const std::string content = render_experiment(config);
    write_file(config.out_path, content);
}

}  // namespace opinion
