#include "opinion/strategy_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace opinion {

std::int64_t schedule_count(std::int64_t T, std::int64_t budget, std::int64_t cap) {
    if (T < 0 || budget < 0 || budget > T)
        throw ValidationError("schedule enumeration needs 0 <= budget <= T");
    const std::int64_t k = std::min(budget, T - budget);
    double count = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) {
        count *= static_cast<double>(T - k + i) / static_cast<double>(i);
        if (count > 2.0 * static_cast<double>(cap))
            throw SearchSpaceTooLarge("C(" + std::to_string(T) + "," + std::to_string(budget) +
                                      ") exceeds the cap of " + std::to_string(cap));
    }
    const std::int64_t rounded = static_cast<std::int64_t>(std::llround(count));
    if (rounded > cap)
        throw SearchSpaceTooLarge("C(" + std::to_string(T) + "," + std::to_string(budget) +
                                  ") = " + std::to_string(rounded) + " exceeds the cap of " +
                                  std::to_string(cap));
    return rounded;
}

void for_each_schedule(std::int64_t T, std::int64_t budget,
                       const std::function<void(const Schedule&)>& visit, std::int64_t cap) {
    schedule_count(T, budget, cap);
    if (budget == 0) {
        visit(Schedule::first_slots(T, 0));
        return;
    }
    std::vector<std::int64_t> slots(static_cast<std::size_t>(budget));
    std::iota(slots.begin(), slots.end(), 0);
    std::vector<bool> mask(static_cast<std::size_t>(T));
    for (;;) {
        std::fill(mask.begin(), mask.end(), false);
        for (std::int64_t s : slots) mask[static_cast<std::size_t>(s)] = true;
        visit(Schedule::from_mask(mask));
        // next combination in lexicographic order
        std::int64_t i = budget - 1;
        while (i >= 0 && slots[static_cast<std::size_t>(i)] == T - budget + i) --i;
        if (i < 0) return;
        ++slots[static_cast<std::size_t>(i)];
        for (std::int64_t j = i + 1; j < budget; ++j)
            slots[static_cast<std::size_t>(j)] = slots[static_cast<std::size_t>(j - 1)] + 1;
    }
}

std::vector<Schedule> enumerate_schedules(std::int64_t T, std::int64_t budget, std::int64_t cap) {
    std::vector<Schedule> out;
    out.reserve(static_cast<std::size_t>(schedule_count(T, budget, cap)));
    for_each_schedule(T, budget, [&](const Schedule& s) { out.push_back(s); }, cap);
    return out;
}

ScheduleSearchResult best_schedule_exact(const SimConfig& config_template,
                                         const MarkovCaps& markov_caps,
                                         std::int64_t schedule_cap) {
    config_template.validate();
    const std::int64_t T = config_template.T;
    const std::int64_t budget = config_template.schedule.budget();
    const Schedule s_first = Schedule::first_slots(T, budget);
    const Schedule s_last = Schedule::last_slots(T, budget);

    ScheduleSearchResult result;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(schedule_count(T, budget, schedule_cap)));
    bool have_best = false;
    for_each_schedule(
        T, budget,
        [&](const Schedule& schedule) {
            SimConfig config = config_template;
            config.schedule = schedule;
            const double value = exact_final_expectation(config, markov_caps);
            values.push_back(value);
            if (!have_best || value > result.best_value) {
                have_best = true;
                result.best_value = value;
                result.best_schedule = schedule;
            }
            if (schedule == s_last) result.value_of_s_last = value;
            if (schedule == s_first) result.value_of_s_first = value;
        },
        schedule_cap);
    result.evaluated_count = static_cast<std::int64_t>(values.size());
    auto rank_of = [&](double v) {
        std::int64_t better = 0;
        for (double x : values)
            if (x > v) ++better;
        return better + 1;
    };
    result.rank_of_s_last = rank_of(result.value_of_s_last);
    result.rank_of_s_first = rank_of(result.value_of_s_first);
    return result;
}

namespace {

double final_delta_for(const SimConfig& config_template, const Schedule& schedule,
                       SwapObjective objective, const MarkovCaps& caps) {
    SimConfig config = config_template;
    config.schedule = schedule;
    if (objective == SwapObjective::ExactMarkov) {
        return 1.0 - exact_final_expectation(config, caps);
    }
    // swapped masks split phases at different slots; resolve each fragment
    // finely enough that the discretization stays below the tie tolerance
    IntegrateOptions opts;
    opts.min_steps_per_phase = 128;
    return integrate_final_delta(config, opts);
}

}  // namespace

SwapComparison swap_compare(const SimConfig& config_template, const Schedule& schedule,
                            std::int64_t t, SwapObjective objective,
                            const MarkovCaps& markov_caps) {
    config_template.validate();
    const Schedule swapped = schedule.with_adjacent_swap(t);  // validates the site
    SwapComparison cmp;
    cmp.final_delta_original = final_delta_for(config_template, schedule, objective, markov_caps);
    cmp.final_delta_swapped = final_delta_for(config_template, swapped, objective, markov_caps);
    const double diff = cmp.final_delta_swapped - cmp.final_delta_original;
    constexpr double kTol = 1e-12;
    if (diff < -kTol)
        cmp.order = SwapComparison::Order::SwappedBetter;
    else if (diff > kTol)
        cmp.order = SwapComparison::Order::OriginalBetter;
    else
        cmp.order = SwapComparison::Order::Tie;
    return cmp;
}

Schedule greedy_swap_optimize(const SimConfig& config_template, Schedule start,
                              SwapObjective objective, const MarkovCaps& markov_caps) {
    Schedule current = std::move(start);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::int64_t t = 0; t + 1 < current.horizon(); ++t) {
            if (!current.influenced(t) || current.influenced(t + 1)) continue;
            const SwapComparison cmp =
                swap_compare(config_template, current, t, objective, markov_caps);
            if (cmp.order == SwapComparison::Order::SwappedBetter) {
                current = current.with_adjacent_swap(t);
                improved = true;
            }
        }
    }
    return current;
}

}  // namespace opinion
