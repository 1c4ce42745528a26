#include "opinion/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opinion {

namespace {

void check_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ValidationError(std::string(name) + " must lie in [0,1], got " +
                              std::to_string(value));
    }
}

}  // namespace

BehaviorSpec BehaviorSpec::pure_s(double p, double q) {
    BehaviorSpec s{BehaviorKind::StrongWilled, p, q, 0.0};
    s.validate();
    return s;
}

BehaviorSpec BehaviorSpec::pure_c(double p, double q) {
    BehaviorSpec s{BehaviorKind::Conformist, p, q, 0.0};
    s.validate();
    return s;
}

BehaviorSpec BehaviorSpec::pure_r(double p, double q) {
    BehaviorSpec s{BehaviorKind::Rebel, p, q, 0.0};
    s.validate();
    return s;
}

BehaviorSpec BehaviorSpec::hybrid_sc(double p, double q, double lambda) {
    BehaviorSpec s{BehaviorKind::HybridStrongConformist, p, q, lambda};
    s.validate();
    return s;
}

BehaviorSpec BehaviorSpec::hybrid_cr(double p, double q, double mu) {
    BehaviorSpec s{BehaviorKind::HybridConformistRebel, p, q, mu};
    s.validate();
    return s;
}

void BehaviorSpec::validate() const {
    check_probability(p, "p");
    check_probability(q, "q");
    check_probability(mix, "mix");
}

InfluenceSpec::InfluenceSpec(double p_tilde, double q_tilde)
    : p_tilde(p_tilde), q_tilde(q_tilde) {
    validate();
}

void InfluenceSpec::validate() const {
    check_probability(p_tilde, "p_tilde");
    check_probability(q_tilde, "q_tilde");
}

PopulationState::PopulationState(std::int64_t M_, std::int64_t N_) : M(M_), N(N_) {
    validate();
}

void PopulationState::validate() const {
    if (M <= 0) throw ValidationError("population size must be positive");
    if (N < 0 || N > M) throw ValidationError("opinion count N must lie in [0, M]");
}

Schedule Schedule::first_slots(std::int64_t horizon, std::int64_t budget) {
    if (horizon < 0) throw ValidationError("schedule horizon must be nonnegative");
    if (budget < 0 || budget > horizon)
        throw ValidationError("schedule budget must lie in [0, horizon]");
    Schedule s;
    s.kind_ = Kind::FirstSlots;
    s.horizon_ = horizon;
    s.budget_ = budget;
    return s;
}

Schedule Schedule::last_slots(std::int64_t horizon, std::int64_t budget) {
    Schedule s = first_slots(horizon, budget);
    s.kind_ = Kind::LastSlots;
    return s;
}

Schedule Schedule::first_fraction(std::int64_t horizon, double b) {
    if (!(b > 0.0 && b <= 1.0)) throw ValidationError("budget fraction b must lie in (0,1]");
    return first_slots(horizon, static_cast<std::int64_t>(std::floor(
                                    b * static_cast<double>(horizon))));
}

Schedule Schedule::last_fraction(std::int64_t horizon, double b) {
    Schedule s = first_fraction(horizon, b);
    s.kind_ = Kind::LastSlots;
    return s;
}

Schedule Schedule::from_mask(std::vector<bool> mask) {
    Schedule s;
    s.kind_ = Kind::Explicit;
    s.horizon_ = static_cast<std::int64_t>(mask.size());
    s.budget_ = std::count(mask.begin(), mask.end(), true);
    s.mask_ = std::move(mask);
    return s;
}

bool Schedule::influenced(std::int64_t t) const {
    if (t < 0 || t >= horizon_) return false;
    switch (kind_) {
        case Kind::FirstSlots:
            return t < budget_;
        case Kind::LastSlots:
            return t >= horizon_ - budget_;
        case Kind::Explicit:
            return mask_[static_cast<std::size_t>(t)];
    }
    return false;
}

std::vector<bool> Schedule::to_mask() const {
    std::vector<bool> mask(static_cast<std::size_t>(horizon_));
    for (std::int64_t t = 0; t < horizon_; ++t) mask[static_cast<std::size_t>(t)] = influenced(t);
    return mask;
}

bool Schedule::is_first_slots() const {
    if (kind_ == Kind::FirstSlots) return true;
    if (kind_ == Kind::LastSlots) return budget_ == 0 || budget_ == horizon_;
    for (std::int64_t t = 0; t < horizon_; ++t)
        if (influenced(t) != (t < budget_)) return false;
    return true;
}

bool Schedule::is_last_slots() const {
    if (kind_ == Kind::LastSlots) return true;
    if (kind_ == Kind::FirstSlots) return budget_ == 0 || budget_ == horizon_;
    for (std::int64_t t = 0; t < horizon_; ++t)
        if (influenced(t) != (t >= horizon_ - budget_)) return false;
    return true;
}

std::vector<Schedule::Run> Schedule::runs() const {
    std::vector<Run> result;
    std::int64_t t = 0;
    while (t < horizon_) {
        bool flag = influenced(t);
        std::int64_t start = t;
        if (kind_ == Kind::Explicit) {
            while (t < horizon_ && influenced(t) == flag) ++t;
        } else {
            // at most two runs
            bool first_influenced = (kind_ == Kind::FirstSlots);
            std::int64_t boundary = first_influenced ? budget_ : horizon_ - budget_;
            t = (start < boundary) ? boundary : horizon_;
        }
        result.push_back(Run{start, t - start, flag});
    }
    return result;
}

Schedule Schedule::with_adjacent_swap(std::int64_t t) const {
    if (t < 0 || t + 1 >= horizon_ || !influenced(t) || influenced(t + 1)) {
        throw InvalidSwapSite("swap site requires an influenced slot followed by an uninfluenced one");
    }
    std::vector<bool> mask = to_mask();
    mask[static_cast<std::size_t>(t)] = false;
    mask[static_cast<std::size_t>(t + 1)] = true;
    return from_mask(std::move(mask));
}

bool Schedule::operator==(const Schedule& other) const {
    if (horizon_ != other.horizon_ || budget_ != other.budget_) return false;
    for (std::int64_t t = 0; t < horizon_; ++t)
        if (influenced(t) != other.influenced(t)) return false;
    return true;
}

double DriftPoly::lipschitz() const {
    // derivative 2*a2*delta + a1 is monotone; endpoints bound it
    return std::max(std::abs(a1), std::abs(2.0 * a2 + a1));
}

DriftPoly natural_drift(const BehaviorSpec& behavior) {
    const double p = behavior.p;
    const double q = behavior.q;
    // M * ddelta/dt = (1-delta)*p_t - delta*q_t for each pure type; hybrids
    // are the mixture of the pure drifts.
    const DriftPoly strong{0.0, -(p + q), p};
    const DriftPoly conformist{-(p - q), p - q, 0.0};
    const DriftPoly rebel{p - q, -2.0 * p, p};
    auto blend = [](const DriftPoly& x, const DriftPoly& y, double w) {
        return DriftPoly{w * x.a2 + (1.0 - w) * y.a2, w * x.a1 + (1.0 - w) * y.a1,
                         w * x.a0 + (1.0 - w) * y.a0};
    };
    switch (behavior.kind) {
        case BehaviorKind::StrongWilled:
            return strong;
        case BehaviorKind::Conformist:
            return conformist;
        case BehaviorKind::Rebel:
            return rebel;
        case BehaviorKind::HybridStrongConformist:
            return blend(strong, conformist, behavior.mix);
        case BehaviorKind::HybridConformistRebel:
            return blend(conformist, rebel, behavior.mix);
    }
    throw ValidationError("unknown behavior kind");
}

SlotRates effective_rates(const BehaviorSpec& behavior,
                          const std::optional<InfluenceSpec>& influence, double delta) {
    if (influence) {
        return SlotRates{influence->p_tilde, influence->q_tilde};
    }
    const double p = behavior.p;
    const double q = behavior.q;
    switch (behavior.kind) {
        case BehaviorKind::StrongWilled:
            return SlotRates{p, q};
        case BehaviorKind::Conformist:
            return SlotRates{p * delta, q * (1.0 - delta)};
        case BehaviorKind::Rebel:
            return SlotRates{p * (1.0 - delta), q * delta};
        case BehaviorKind::HybridStrongConformist: {
            const double lam = behavior.mix;
            return SlotRates{lam * p + (1.0 - lam) * p * delta,
                             lam * q + (1.0 - lam) * q * (1.0 - delta)};
        }
        case BehaviorKind::HybridConformistRebel: {
            const double mu = behavior.mix;
            return SlotRates{mu * p * delta + (1.0 - mu) * p * (1.0 - delta),
                             mu * q * (1.0 - delta) + (1.0 - mu) * q * delta};
        }
    }
    throw ValidationError("unknown behavior kind");
}

ChiDistribution chi_distribution(double delta, const SlotRates& rates) {
    ChiDistribution d;
    d.down = delta * rates.q_t;
    d.up = (1.0 - delta) * rates.p_t;
    d.stay = 1.0 - d.down - d.up;
    return d;
}

ChiDistribution chi_distribution(const PopulationState& state, const SlotRates& rates) {
    return chi_distribution(state.delta(), rates);
}

}  // namespace opinion
