#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "opinion/exact_markov.hpp"
#include "opinion/ode_analysis.hpp"

namespace opinion {

// Number of budget-respecting schedules, C(T, budget); throws
// SearchSpaceTooLarge beyond `cap`.
std::int64_t schedule_count(std::int64_t T, std::int64_t budget, std::int64_t cap = 100000);

// Visit every schedule with the given budget exactly once, in lexicographic
// order of the influenced-slot tuples (so the influence-first schedule comes
// first and the influence-last one comes last).
void for_each_schedule(std::int64_t T, std::int64_t budget,
                       const std::function<void(const Schedule&)>& visit,
                       std::int64_t cap = 100000);

std::vector<Schedule> enumerate_schedules(std::int64_t T, std::int64_t budget,
                                          std::int64_t cap = 100000);

struct ScheduleSearchResult {
    Schedule best_schedule;
    double best_value = 0.0;  // E[Yes(T)] / M under the best schedule
    std::int64_t evaluated_count = 0;
    double value_of_s_last = 0.0;
    double value_of_s_first = 0.0;
    std::int64_t rank_of_s_last = 0;   // 1-based, by strictly larger value
    std::int64_t rank_of_s_first = 0;
};

// Exhaustive search over all schedules with the template's budget, scored by
// the exact expected final "Yes" fraction. Ties keep the first schedule in
// enumeration order.
ScheduleSearchResult best_schedule_exact(const SimConfig& config_template,
                                         const MarkovCaps& markov_caps = {},
                                         std::int64_t schedule_cap = 100000);

enum class SwapObjective { ExactMarkov, OdeNumeric };

struct SwapComparison {
    double final_delta_original = 0.0;
    double final_delta_swapped = 0.0;
    // winner convention as elsewhere: smaller final "No" fraction is better
    enum class Order { OriginalBetter, SwappedBetter, Tie } order = Order::Tie;
};

// Compare a schedule against its variant with slots t (influenced) and t+1
// (not influenced) exchanged, i.e. the influence moved one slot later.
SwapComparison swap_compare(const SimConfig& config_template, const Schedule& schedule,
                            std::int64_t t, SwapObjective objective,
                            const MarkovCaps& markov_caps = {});

// Repeatedly apply improving adjacent swaps (influence pushed later) until
// none helps; returns the reached schedule.
Schedule greedy_swap_optimize(const SimConfig& config_template, Schedule start,
                              SwapObjective objective, const MarkovCaps& markov_caps = {});

}  // namespace opinion
