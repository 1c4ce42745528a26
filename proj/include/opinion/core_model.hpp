#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opinion/errors.hpp"

namespace opinion {

// Per-slot behavior of the randomly chosen individual when no external
// influence is applied.
//
//   StrongWilled          flip rates (p, q) independent of the population
//   Conformist            flip toward an opinion grows with its popularity
//   Rebel                 flip toward an opinion grows with its unpopularity
//   HybridStrongConformist  strong-willed w.p. mix, conformist otherwise
//   HybridConformistRebel   conformist w.p. mix, rebel otherwise
enum class BehaviorKind {
    StrongWilled,
    Conformist,
    Rebel,
    HybridStrongConformist,
    HybridConformistRebel,
};

struct BehaviorSpec {
    BehaviorKind kind = BehaviorKind::StrongWilled;
    double p = 0.0;    // yes -> no base rate
    double q = 0.0;    // no -> yes base rate
    double mix = 0.0;  // mixture weight for the hybrid kinds, unused otherwise

    static BehaviorSpec pure_s(double p, double q);
    static BehaviorSpec pure_c(double p, double q);
    static BehaviorSpec pure_r(double p, double q);
    static BehaviorSpec hybrid_sc(double p, double q, double lambda);
    static BehaviorSpec hybrid_cr(double p, double q, double mu);

    void validate() const;
    bool is_hybrid_sc() const { return kind == BehaviorKind::HybridStrongConformist; }
    bool is_hybrid_cr() const { return kind == BehaviorKind::HybridConformistRebel; }
};

// Flip rates of an externally influenced slot. `rational()` reports whether
// the influence pushes toward "Yes" more than away from it; analysis
// operations that assume this refuse violating inputs.
struct InfluenceSpec {
    double p_tilde = 0.0;
    double q_tilde = 0.0;

    InfluenceSpec() = default;
    InfluenceSpec(double p_tilde, double q_tilde);

    void validate() const;
    bool rational() const { return p_tilde < q_tilde; }
    // Fixed point of the influenced dynamics; 0 when both rates vanish.
    double fixed_point() const {
        double s = p_tilde + q_tilde;
        return s > 0.0 ? p_tilde / s : 0.0;
    }
};

// Counts of the two opinions in a population of M individuals.
// N = number of "No", Y = M - N = number of "Yes".
struct PopulationState {
    std::int64_t M = 1;
    std::int64_t N = 0;

    PopulationState() = default;
    PopulationState(std::int64_t M, std::int64_t N);

    void validate() const;
    std::int64_t yes_count() const { return M - N; }
    double delta() const { return static_cast<double>(N) / static_cast<double>(M); }
};

// Boolean influence mask over a horizon of T slots. The two named schedules
// (influence the first / last `budget` slots) are stored implicitly so that
// million-slot horizons stay cheap; arbitrary masks use explicit storage.
class Schedule {
public:
    Schedule() = default;

    static Schedule first_slots(std::int64_t horizon, std::int64_t budget);
    static Schedule last_slots(std::int64_t horizon, std::int64_t budget);
    // budget = floor(b * horizon)
    static Schedule first_fraction(std::int64_t horizon, double b);
    static Schedule last_fraction(std::int64_t horizon, double b);
    static Schedule from_mask(std::vector<bool> mask);

    std::int64_t horizon() const { return horizon_; }
    std::int64_t budget() const { return budget_; }
    bool influenced(std::int64_t t) const;
    std::vector<bool> to_mask() const;

    bool is_first_slots() const;
    bool is_last_slots() const;

    // Maximal runs of constant influence, in time order.
    struct Run {
        std::int64_t start;
        std::int64_t length;
        bool influenced;
    };
    std::vector<Run> runs() const;

    // Copy with slots t and t+1 exchanged. Requires influenced(t) and
    // !influenced(t+1).
    Schedule with_adjacent_swap(std::int64_t t) const;

    bool operator==(const Schedule& other) const;

private:
    enum class Kind { FirstSlots, LastSlots, Explicit };
    Kind kind_ = Kind::FirstSlots;
    std::int64_t horizon_ = 0;
    std::int64_t budget_ = 0;
    std::vector<bool> mask_;  // Explicit only
};

struct SlotRates {
    double p_t = 0.0;
    double q_t = 0.0;
};

// Coefficients of the natural (uninfluenced) mean-field drift,
// M * d(delta)/dt = a2*delta^2 + a1*delta + a0.
struct DriftPoly {
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    double eval(double delta) const { return (a2 * delta + a1) * delta + a0; }
    // Lipschitz bound of eval over [0, 1].
    double lipschitz() const;
};

DriftPoly natural_drift(const BehaviorSpec& behavior);

// One-slot flip rates for the chosen individual. With influence present the
// natural behavior is irrelevant; otherwise hybrid kinds mix the pure-type
// rates in expectation (the per-slot type draw is independent, so the
// one-step law is identical to sampling the type).
SlotRates effective_rates(const BehaviorSpec& behavior,
                          const std::optional<InfluenceSpec>& influence, double delta);

// Law of the one-slot change chi in N: P(-1), P(0), P(+1).
struct ChiDistribution {
    double down = 0.0;  // one "No" flips to "Yes"
    double stay = 0.0;
    double up = 0.0;  // one "Yes" flips to "No"
};

ChiDistribution chi_distribution(const PopulationState& state, const SlotRates& rates);
ChiDistribution chi_distribution(double delta, const SlotRates& rates);

}  // namespace opinion
