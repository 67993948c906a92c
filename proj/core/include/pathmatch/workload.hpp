#ifndef PATHMATCH_WORKLOAD_HPP
#define PATHMATCH_WORKLOAD_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/artree.hpp"
#include "pathmatch/correlation.hpp"
#include "pathmatch/graph.hpp"
#include "pathmatch/paths.hpp"
#include "pathmatch/rng.hpp"
#include "pathmatch/weight_model.hpp"

namespace pathmatch {

/// Zipf(s) over ranks 0..n-1: P(k) proportional to 1/(k+1)^s.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double s);
    std::size_t sample(Rng& rng) const;
    std::size_t size() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

struct CacheWorkloadParams {
    std::size_t universe = 2000;       // distinct path ids
    double zipf_s = 1.2;
    std::uint32_t bundle_count = 10;
    std::uint32_t bundle_size = 20;
    double bundle_prob = 0.3;          // chance a query is a bundle scan
    std::uint32_t paths_per_query = 5; // Zipf draws otherwise
};

struct CacheWorkload {
    std::vector<std::vector<PathId>> queries;      // accessed ids per query
    std::vector<std::vector<PathId>> bundles;
};

/// Skewed access stream with planted co-occurring bundles: bundle queries
/// touch one whole bundle, others draw i.i.d. Zipf ranks mapped through a
/// seeded permutation of the universe.
CacheWorkload generate_cache_workload(const CacheWorkloadParams& params,
                                      std::size_t query_count, std::uint64_t seed);

struct WarmupResult {
    std::uint64_t executed = 0;
    std::uint64_t sampler_fallbacks = 0;
    std::vector<double> shard_prune_rate;             // mean filter pruning per shard
    std::map<PathId, std::uint64_t> path_access_count;
    std::vector<FeatureSnapshot> snapshots;           // one row per pseudo-query
};

/// Plays `count` routed-but-unverified pseudo-queries to prefill the co-query
/// window and measure per-shard pruning rates. Queries are random-walk
/// samples targeting average degree 3..7; graphs too sparse for that range
/// fall back per query to an unconstrained range.
WarmupResult warmup_pseudo_queries(const LabeledGraph& g,
                                   std::span<const ARTree> shard_indexes,
                                   std::uint32_t data_max_degree, CorrState& state,
                                   std::uint32_t count, std::uint64_t seed,
                                   std::int64_t now_us);

} // namespace pathmatch

#endif
