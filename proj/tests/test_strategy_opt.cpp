#include <doctest.h>

#include <cmath>

#include "opinion/strategy_opt.hpp"

using namespace opinion;

namespace {

SimConfig search_config_pq_equal() {
    SimConfig c;
    c.M = 20;
    c.T = 12;
    c.behavior = BehaviorSpec::hybrid_sc(0.5, 0.5, 0.5);
    c.influence = InfluenceSpec(0.1, 0.9);
    c.delta0 = 0.5;
    c.schedule = Schedule::last_slots(12, 4);
    return c;
}

SimConfig search_config_first_favored() {
    SimConfig c;
    c.M = 20;
    c.T = 12;
    c.behavior = BehaviorSpec::hybrid_sc(0.1, 0.9, 0.1);
    c.influence = InfluenceSpec(0.0, 1.0);
    c.delta0 = 0.8;
    c.schedule = Schedule::last_slots(12, 4);
    return c;
}

}  // namespace

TEST_CASE("schedule counts") {
    CHECK(schedule_count(3, 3) == 1);
    CHECK(schedule_count(4, 1) == 4);
    CHECK(schedule_count(12, 4) == 495);
    CHECK_THROWS_AS(schedule_count(60, 30), SearchSpaceTooLarge);
}

TEST_CASE("enumeration is complete, duplicate-free and deterministically ordered") {
    const std::vector<Schedule> all = enumerate_schedules(6, 2);
    CHECK(all.size() == 15);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) CHECK_FALSE(all[i] == all[j]);
    // lexicographic slot tuples: influence-first comes first, influence-last last
    CHECK(all.front() == Schedule::first_slots(6, 2));
    CHECK(all.back() == Schedule::last_slots(6, 2));
    const std::vector<Schedule> again = enumerate_schedules(6, 2);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == again[i]);
}

TEST_CASE("indistinguishable influence makes every schedule equal") {
    SimConfig c = search_config_pq_equal();
    c.behavior = BehaviorSpec::pure_s(0.5, 0.5);
    c.influence = InfluenceSpec(0.5, 0.5);
    const ScheduleSearchResult result = best_schedule_exact(c);
    CHECK(result.evaluated_count == 495);
    CHECK(result.best_value == doctest::Approx(result.value_of_s_last).epsilon(1e-14));
    CHECK(result.rank_of_s_last == 1);
    CHECK(result.rank_of_s_first == 1);
    // ties keep the first schedule in enumeration order
    CHECK(result.best_schedule == Schedule::first_slots(12, 4));
}

TEST_CASE("exhaustive search ranks influence-last first on the equal-rate instance") {
    const ScheduleSearchResult result = best_schedule_exact(search_config_pq_equal());
    CHECK(result.evaluated_count == 495);
    CHECK(result.best_schedule == Schedule::last_slots(12, 4));
    CHECK(result.rank_of_s_last == 1);
    CHECK(result.best_value == doctest::Approx(0.5741975).epsilon(1e-9));
    CHECK(result.best_value >= result.value_of_s_first);
}

TEST_CASE("exhaustive search puts influence-first ahead on the conformist-leaning instance") {
    const ScheduleSearchResult result = best_schedule_exact(search_config_first_favored());
    CHECK(result.rank_of_s_first < result.rank_of_s_last);
}

TEST_CASE("swapping influence later helps when rates are equal") {
    const SimConfig c = search_config_pq_equal();
    const Schedule schedule = Schedule::from_mask(
        {true, true, false, false, true, false, false, false, true, false, false, false});
    SUBCASE("mean-field objective") {
        const SwapComparison cmp = swap_compare(c, schedule, 1, SwapObjective::OdeNumeric);
        CHECK(cmp.order == SwapComparison::Order::SwappedBetter);
    }
    SUBCASE("exact objective agrees") {
        const SwapComparison cmp = swap_compare(c, schedule, 1, SwapObjective::ExactMarkov);
        CHECK(cmp.order == SwapComparison::Order::SwappedBetter);
    }
}

TEST_CASE("zero mixing makes adjacent swaps indifferent") {
    SimConfig c = search_config_pq_equal();
    c.behavior.mix = 0.0;
    const Schedule schedule = Schedule::from_mask(
        {true, true, true, true, false, false, false, false, false, false, false, false});
    const SwapComparison cmp = swap_compare(c, schedule, 3, SwapObjective::OdeNumeric);
    CHECK(cmp.order == SwapComparison::Order::Tie);
}

TEST_CASE("swap sites are validated") {
    const SimConfig c = search_config_pq_equal();
    const Schedule schedule = Schedule::last_slots(12, 4);
    CHECK_THROWS_AS(swap_compare(c, schedule, 0, SwapObjective::OdeNumeric), InvalidSwapSite);
    CHECK_THROWS_AS(swap_compare(c, schedule, 11, SwapObjective::OdeNumeric), InvalidSwapSite);
}

TEST_CASE("greedy swaps from any start reach the exhaustive winner when rates are equal") {
    const SimConfig c = search_config_pq_equal();
    const ScheduleSearchResult exhaustive = best_schedule_exact(c);
    const Schedule starts[] = {
        Schedule::first_slots(12, 4),
        Schedule::from_mask(
            {true, false, true, false, true, false, true, false, false, false, false, false}),
        Schedule::from_mask(
            {false, false, true, true, false, false, true, false, false, true, false, false}),
    };
    for (const Schedule& start : starts) {
        const Schedule reached = greedy_swap_optimize(c, start, SwapObjective::ExactMarkov);
        CHECK(reached == exhaustive.best_schedule);
    }
}

TEST_CASE("search respects the enumeration cap") {
    SimConfig c = search_config_pq_equal();
    CHECK_THROWS_AS(best_schedule_exact(c, MarkovCaps{}, 100), SearchSpaceTooLarge);
}
