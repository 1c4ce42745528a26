#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "opinion/experiments.hpp"

namespace {

int exit_code_for(const opinion::Error& e) {
    const std::string& code = e.code();
    if (code == "CostCapExceeded" || code == "SearchSpaceTooLarge" || code == "StepSizeTooCoarse")
        return 3;
    if (code == "IoFailure") return 4;
    return 2;
}

void print_error(const std::string& code, const std::string& message) {
    nlohmann::json j{{"error", {{"code", code}, {"message", message}}}};
    std::cerr << j.dump() << "\n";
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::int64_t> reps;
    std::optional<std::int64_t> cap_states;
    std::optional<std::int64_t> cap_schedules;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* opt = cmd->add_option("--config", flags.config_path, "experiment config JSON");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "base RNG seed (overrides config)");
    cmd->add_option("--out", flags.out, "output path (overrides config)");
    cmd->add_option("--format", flags.format, "output format: csv or json");
    cmd->add_option("--reps", flags.reps, "replication count (overrides config)");
    cmd->add_option("--cap-states", flags.cap_states, "exact-propagation population cap");
    cmd->add_option("--cap-schedules", flags.cap_schedules, "schedule enumeration cap");
}

void apply_overrides(opinion::ExperimentConfig& config, const CommonFlags& flags) {
    if (flags.seed) config.base_seed = *flags.seed;
    if (flags.out) config.out_path = *flags.out;
    if (flags.format) config.format = opinion::parse_output_format(*flags.format);
    if (flags.reps) config.n_reps = *flags.reps;
    if (flags.cap_states) config.caps.max_states = *flags.cap_states;
    if (flags.cap_schedules) config.caps.max_schedules = *flags.cap_schedules;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opinion dynamics simulator and strategy analysis toolkit"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        opinion::ExperimentKind kind;
    };
    const Sub subs[] = {
        {"simulate", "Monte Carlo simulation of the opinion process", opinion::ExperimentKind::Simulate},
        {"ode", "mean-field trajectory by numerical integration", opinion::ExperimentKind::Ode},
        {"compare", "first-vs-last strategy comparison (optionally swept)", opinion::ExperimentKind::Compare},
        {"crossover", "locate the mixing value where the winner flips", opinion::ExperimentKind::Crossover},
        {"bruteforce", "exhaustive schedule search with the exact objective", opinion::ExperimentKind::Bruteforce},
        {"concentration", "tail bound check against a seeded ensemble", opinion::ExperimentKind::Concentration},
    };

    CommonFlags flags[7];
    CLI::App* cmds[7];
    for (int i = 0; i < 6; ++i) {
        cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
        add_common_flags(cmds[i], flags[i], true);
    }
    int figure = 0;
    cmds[6] = app.add_subcommand("reproduce-fig", "regenerate a figure data set from its preset");
    cmds[6]->add_option("figure", figure, "figure index 1..5")->required();
    add_common_flags(cmds[6], flags[6], false);

    CLI11_PARSE(app, argc, argv);

    try {
        opinion::ExperimentConfig config;
        int chosen = -1;
        for (int i = 0; i < 7; ++i)
            if (cmds[i]->parsed()) chosen = i;
        if (chosen < 6) {
            config = opinion::load_experiment_config(flags[chosen].config_path);
            if (config.kind != subs[chosen].kind)
                throw opinion::ValidationError(
                    "config declares experiment '" + opinion::experiment_kind_name(config.kind) +
                    "' but the subcommand is '" + std::string(subs[chosen].name) + "'");
        } else {
            if (!flags[6].config_path.empty()) {
                config = opinion::load_experiment_config(flags[6].config_path);
                if (config.kind != opinion::ExperimentKind::ReproduceFig ||
                    config.figure != figure)
                    throw opinion::ValidationError("config does not describe this figure");
            } else {
                config = opinion::figure_preset(figure);
            }
            if (config.out_path.empty()) config.out_path = "fig" + std::to_string(figure) + ".csv";
        }
        apply_overrides(config, flags[chosen]);
        opinion::run_experiment(config);
        return 0;
    } catch (const opinion::Error& e) {
        print_error(e.code(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        print_error("ConfigInvalid", e.what());
        return 2;
    }
}
