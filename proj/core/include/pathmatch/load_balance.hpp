#ifndef PATHMATCH_LOAD_BALANCE_HPP
#define PATHMATCH_LOAD_BALANCE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pathmatch/partition.hpp"

namespace pathmatch {

// Tunables of the balancing policy. All values are fixed by the design; they
// live in one place so the constants suite can pin them.
inline constexpr double kLoadWeightCpu = 0.4;
inline constexpr double kLoadWeightComm = 0.3;
inline constexpr double kLoadWeightMem = 0.3;
inline constexpr double kSigmaTrigger = 0.30;
inline constexpr double kLoadThreshold = 0.8;   // machine counts as overloaded above this
inline constexpr double kCapacityLimit = 0.85;  // Cap
inline constexpr double kReservedFraction = 0.10;
inline constexpr double kNonCriticalDeltaL = 0.2;
inline constexpr int kMigrationBatchK = 5;
inline constexpr int kRetransmitBudget = 100;
inline constexpr std::int64_t kDwellMicros = 100'000;  // healthy-service wait before freeing
inline constexpr double kPriorityEps = 1e-6;

struct LoadSample {
    std::uint32_t shard_id = 0;
    double u_cpu = 0.0;       // [0,1]
    double comm_count = 0.0;  // cross-shard queries/sec touching the shard
    double mem_ratio = 0.0;   // [0,1]
    std::int64_t timestamp_us = 0;
};

struct ClusterLoadView {
    std::vector<double> machine_load;
    double mean = 0.0;
    double sigma = 0.0;  // population standard deviation
    double comm_max = 0.0;
    bool triggered = false;
};

struct MigrationCandidate {
    std::uint32_t shard_id = 0;
    double priority = 0.0;
    std::uint32_t target_machine = 0;
    bool deferred = false;  // no eligible target this round
};

struct MigrationPlan {
    std::uint32_t source_machine = 0;
    double delta_l = 0.0;
    std::vector<MigrationCandidate> candidates;  // descending priority

    bool critical() const { return delta_l > kNonCriticalDeltaL; }
};

double machine_load(std::span<const LoadSample> samples, double comm_max);

ClusterLoadView cluster_stats(std::span<const double> machine_loads, double comm_max = 0.0);

// Staleness weight of offline correlation statistics, 0.7 at start-up and
// gone after 60 seconds.
double alpha_decay(double t_seconds);

struct MigrationCount {
    std::uint32_t m = 1;
    double u_quantile = 0.0;
};

// How many shards to shed for a load excess delta_l, scaled by the
// nearest-rank 75th/90th/95th percentile of the source's shard loads (the
// percentile grows with the skew of those loads).
MigrationCount migration_count(double delta_l, std::span<const double> shard_loads);

double candidate_priority(double cross_query_ratio, double corr_local, double size_units,
                          double prune_rate);

struct TargetQuery {
    std::span<const double> machine_loads;
    double mean = 0.0;
    double sigma = 0.0;
    // Per-machine mean dynamic correlation between the migrating shard and the
    // machine's resident shards, and likewise for label similarity.
    std::span<const double> mean_corr;
    std::span<const double> mean_w_label;
};

// Light-load machine maximizing corr * headroom * label affinity;
// std::nullopt when no machine is eligible (migration deferred).
std::optional<std::uint32_t> select_target(const TargetQuery& q);

} // namespace pathmatch

#endif
