#ifndef PATHMATCH_CACHE_HPP
#define PATHMATCH_CACHE_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pathmatch/graph.hpp"
#include "pathmatch/paths.hpp"

namespace pathmatch {

inline constexpr double kFeatureTau = 300.0;           // seconds
inline constexpr std::uint32_t kFreqWindowQueries = 1000;
inline constexpr std::uint32_t kMasterTopScope = 500;
inline constexpr std::uint32_t kSlaveTopScope = 100;
inline constexpr std::uint32_t kProtectedTopScope = 50;
inline constexpr std::uint32_t kSnapshotEpochQueries = 50;

using FeatureVec = std::array<double, 4>;
using Weights = std::array<double, 4>;  // alpha, beta, gamma, delta

double decay_feature(double f0, double t_seconds, double tau = kFeatureTau);

// Eviction trigger threshold from current hit rate and latency; healthy
// caches tolerate higher utilization before shedding entries.
double trigger_threshold(double hit_rate, double latency_ms);

inline double low_threshold(double t_up) { return t_up - 0.1; }

// Degree bar for eviction protection: half the 95th-percentile vertex degree,
// floored at 10.
double degree_threshold(const LabeledGraph& g);

double cache_value(const FeatureVec& f, const Weights& w, double mean_degree);

struct SyncSettings {
    double window_s = 30.0;
    double weight_sync_s = 30.0;
    double quota_sync_s = 60.0;

    bool operator==(const SyncSettings&) const = default;
};

SyncSettings window_and_sync(double queries_per_sec, std::uint32_t recent_query_count);

struct CacheEntry {
    PathId id = 0;
    FeatureVec features{};                       // raw values at their birth times
    std::array<std::int64_t, 4> feature_birth_us{};
    std::int64_t last_access_us = 0;
    std::uint64_t match_freq = 0;
    std::uint64_t total_freq = 0;
    double mean_degree = 0.0;
    double value = 0.0;
};

struct FeatureWindowStats {
    double max_freq = 0.0;
    double max_co_count = 0.0;
    double window_duration_s = 30.0;
};

struct FeatureInputs {
    double freq = 0.0;
    double co_count = 0.0;
    double idle_s = 0.0;  // now - last access
    std::uint64_t match_freq = 0;
    std::uint64_t total_freq = 0;
};

FeatureVec feature_snapshot(const FeatureInputs& in, const FeatureWindowStats& stats);

struct EvictionInput {
    PathId id = 0;
    double value = 0.0;
    double mean_degree = 0.0;
};

// Tiered replacement: entries below 20% of the max value always leave; the
// mid band leaves lowest-value-first until utilization reaches t_up - 0.1;
// high-value entries that are also top-50 frequent or high-degree never do.
std::vector<PathId> select_evictions(std::span<const EvictionInput> entries,
                                     std::size_t c_max, double t_up, double theta_d,
                                     std::span<const PathId> top50_sorted);

enum class CachePolicy { Adaptive, Lru };

enum class CacheSource { MasterCache, SlaveCache, SlaveMemory, NotFound };

class CacheTier {
public:
    CacheTier() = default;
    CacheTier(std::size_t capacity, CachePolicy policy)
        : capacity_(capacity), policy_(policy) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    CachePolicy policy() const { return policy_; }

    bool contains(PathId id) const { return entries_.count(id) != 0; }
    CacheEntry* find(PathId id);
    bool touch(PathId id, std::int64_t now_us);  // true on hit

    // Admission. Adaptive tiers take the entry only when its value clears the
    // current admission threshold; both policies evict as needed to respect
    // capacity (adaptive never evicts protected entries and may refuse).
    bool insert(const CacheEntry& e, double t_up, double theta_d,
                std::span<const PathId> top50_sorted);

    void set_value(PathId id, double v);
    std::vector<PathId> run_eviction(double t_up, double theta_d,
                                     std::span<const PathId> top50_sorted);

    // Minimum value among residents when at capacity, else 0.
    double admission_threshold() const;

    std::vector<PathId> resident_ids() const;  // ascending

    struct Stats {
        std::uint64_t hits = 0;
        std::uint64_t misses = 0;
        std::uint64_t evicted_evictable = 0;
        std::uint64_t evicted_normal = 0;
        std::uint64_t evicted_lru = 0;
        std::uint64_t protected_evictions = 0;  // must stay 0
        std::uint64_t rejected_inserts = 0;
    };
    const Stats& stats() const { return stats_; }

private:
    std::vector<PathId> evict_for_space(double t_up, double theta_d,
                                        std::span<const PathId> top50_sorted);
    double value_ceiling() const;

    std::size_t capacity_ = 0;
    CachePolicy policy_ = CachePolicy::Adaptive;
    std::map<PathId, CacheEntry> entries_;
    std::map<PathId, std::uint64_t> lru_tick_;
    std::uint64_t tick_ = 0;
    Stats stats_;
};

/// Sliding window over the last kFreqWindowQueries queries: per-path access
/// frequency, co-access counts against the top-100 set, and top-N rankings.
/// The top-100 reference set refreshes once per 50-query epoch.
class AccessWindow {
public:
    void record_query(std::span<const PathId> accessed);

    double freq(PathId id) const;
    double max_freq() const;
    double co_count(PathId id) const;
    double max_co_count() const;
    std::uint64_t query_count() const { return seq_; }

    std::vector<PathId> top_n(std::size_t n) const;  // by freq desc, id asc
    const std::vector<PathId>& top100() const { return top100_; }

private:
    void refresh_top100();

    struct QueryRecord {
        std::vector<PathId> paths;
        std::vector<std::pair<PathId, std::uint64_t>> co_deltas;
    };

    std::uint64_t seq_ = 0;
    std::deque<QueryRecord> window_;
    std::map<PathId, std::uint64_t> freq_;
    std::map<PathId, std::uint64_t> co_;
    std::vector<PathId> top100_;  // sorted ascending for lookup
};

} // namespace pathmatch

#endif
