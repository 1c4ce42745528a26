#include "opinion/mc_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace opinion {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// 53-bit uniform in [0,1).
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

Trajectory decimate(const Trajectory& traj, std::int64_t every,
                    const std::vector<std::int64_t>& anchors) {
    if (every <= 0) throw ValidationError("decimation stride must be positive");
    Trajectory out;
    out.source = traj.source;
    const std::size_t n = traj.times.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t t = traj.times[i];
        bool keep = (i == 0 || i + 1 == n) || (t % every == 0) ||
                    std::find(anchors.begin(), anchors.end(), t) != anchors.end();
        if (keep) {
            out.times.push_back(t);
            out.values.push_back(traj.values[i]);
        }
    }
    return out;
}

void SimConfig::validate() const {
    if (M <= 0) throw ValidationError("population size M must be positive");
    if (T < 0) throw ValidationError("horizon T must be nonnegative");
    behavior.validate();
    influence.validate();
    if (!(delta0 >= 0.0 && delta0 <= 1.0))
        throw ValidationError("initial fraction delta0 must lie in [0,1]");
    if (schedule.horizon() != T)
        throw ValidationError("schedule horizon must equal the simulation horizon");
}

std::int64_t SimConfig::initial_no_count() const {
    return static_cast<std::int64_t>(
        std::floor(delta0 * static_cast<double>(M) + 0.5));
}

double EnsembleStats::stderr_final() const {
    return n_reps > 0 ? std_final_delta / std::sqrt(static_cast<double>(n_reps)) : 0.0;
}

std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) {
    return mix64(base_seed + replication * kGolden);
}

namespace {

// Core path sampler. Appends each delta into `record` if non-null (T+1
// points including t=0) and returns the final delta.
double run_path(const SimConfig& config, std::uint64_t seed, std::vector<double>* record) {
    std::mt19937_64 gen(seed);
    const double M = static_cast<double>(config.M);
    std::int64_t N = config.initial_no_count();
    if (record) {
        record->clear();
        record->reserve(static_cast<std::size_t>(config.T) + 1);
        record->push_back(static_cast<double>(N) / M);
    }
    const BehaviorSpec& behavior = config.behavior;
    const bool sample_type = config.sample_type_per_slot;
    for (std::int64_t t = 0; t < config.T; ++t) {
        const double delta = static_cast<double>(N) / M;
        SlotRates rates;
        if (config.schedule.influenced(t)) {
            rates = SlotRates{config.influence.p_tilde, config.influence.q_tilde};
        } else if (sample_type && behavior.is_hybrid_sc()) {
            const bool strong = uniform01(gen) < behavior.mix;
            rates = effective_rates(strong ? BehaviorSpec{BehaviorKind::StrongWilled,
                                                          behavior.p, behavior.q, 0.0}
                                           : BehaviorSpec{BehaviorKind::Conformist,
                                                          behavior.p, behavior.q, 0.0},
                                    std::nullopt, delta);
        } else if (sample_type && behavior.is_hybrid_cr()) {
            const bool conform = uniform01(gen) < behavior.mix;
            rates = effective_rates(conform ? BehaviorSpec{BehaviorKind::Conformist,
                                                           behavior.p, behavior.q, 0.0}
                                            : BehaviorSpec{BehaviorKind::Rebel,
                                                           behavior.p, behavior.q, 0.0},
                                    std::nullopt, delta);
        } else {
            rates = effective_rates(behavior, std::nullopt, delta);
        }
        const ChiDistribution chi = chi_distribution(delta, rates);
        const double u = uniform01(gen);
        if (u < chi.down) {
            --N;
        } else if (u < chi.down + chi.up) {
            ++N;
        }
        if (record) record->push_back(static_cast<double>(N) / M);
    }
    return static_cast<double>(N) / M;
}

}  // namespace

Trajectory simulate_once(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    Trajectory traj;
    traj.source = TrajectorySource::MonteCarlo;
    run_path(config, seed, &traj.values);
    traj.times.resize(traj.values.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        traj.times[i] = static_cast<std::int64_t>(i);
    return traj;
}

EnsembleStats simulate_ensemble(const SimConfig& config, std::int64_t n_reps,
                                std::uint64_t base_seed, int threads) {
    config.validate();
    if (n_reps < 1) throw ValidationError("ensemble needs at least one replication");

    constexpr std::int64_t kChunk = 16;
    const std::int64_t n_chunks = (n_reps + kChunk - 1) / kChunk;
    struct ChunkOut {
        std::vector<double> traj_sum;
        std::vector<double> finals;
    };
    std::vector<ChunkOut> chunks(static_cast<std::size_t>(n_chunks));

    auto run_chunk = [&](std::int64_t c) {
        ChunkOut out;
        out.traj_sum.assign(static_cast<std::size_t>(config.T) + 1, 0.0);
        std::vector<double> path;
        const std::int64_t lo = c * kChunk;
        const std::int64_t hi = std::min(n_reps, lo + kChunk);
        for (std::int64_t r = lo; r < hi; ++r) {
            run_path(config, replication_seed(base_seed, static_cast<std::uint64_t>(r)),
                     &path);
            for (std::size_t i = 0; i < path.size(); ++i) out.traj_sum[i] += path[i];
            out.finals.push_back(path.back());
        }
        chunks[static_cast<std::size_t>(c)] = std::move(out);
    };

    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(n_chunks)));
    if (n_threads == 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::int64_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                run_chunk(c);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduce in chunk order: results are independent of scheduling.
    EnsembleStats stats;
    stats.n_reps = n_reps;
    stats.mean_trajectory.assign(static_cast<std::size_t>(config.T) + 1, 0.0);
    stats.final_deltas.reserve(static_cast<std::size_t>(n_reps));
    for (const ChunkOut& out : chunks) {
        for (std::size_t i = 0; i < stats.mean_trajectory.size(); ++i)
            stats.mean_trajectory[i] += out.traj_sum[i];
        for (double f : out.finals) stats.final_deltas.push_back(f);
    }
    const double inv = 1.0 / static_cast<double>(n_reps);
    for (double& v : stats.mean_trajectory) v *= inv;

    double mean = 0.0;
    for (double f : stats.final_deltas) mean += f;
    mean *= inv;
    stats.mean_final_delta = mean;
    if (n_reps > 1) {
        double ss = 0.0;
        for (double f : stats.final_deltas) ss += (f - mean) * (f - mean);
        stats.std_final_delta = std::sqrt(ss / static_cast<double>(n_reps - 1));
    }
    return stats;
}

double empirical_tail(const EnsembleStats& stats, double center, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("tail epsilon must be positive");
    std::int64_t count = 0;
    for (double f : stats.final_deltas)
        if (std::abs(f - center) > epsilon) ++count;
    return static_cast<double>(count) / static_cast<double>(stats.final_deltas.size());
}

}  // namespace opinion
