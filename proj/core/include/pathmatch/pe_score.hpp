#ifndef PATHMATCH_PE_SCORE_HPP
#define PATHMATCH_PE_SCORE_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pathmatch/artree.hpp"
#include "pathmatch/gbdt.hpp"
#include "pathmatch/graph.hpp"
#include "pathmatch/paths.hpp"
#include "pathmatch/shard_features.hpp"

namespace pathmatch {

// Deterministic cost model for one filter invocation, in simulated ms.
inline constexpr double kFilterCostBase = 0.1;      // c0
inline constexpr double kFilterCostPerNode = 0.01;  // c1

inline double filter_time_ms(std::uint64_t nodes_visited) {
    return kFilterCostBase + kFilterCostPerNode * static_cast<double>(nodes_visited);
}

std::uint32_t adaptive_tree_count(std::uint64_t n_sample);

inline constexpr std::size_t kPEFeatureCount = 15;

struct PESample {
    std::vector<double> features;
    std::uint64_t n_valid = 0;
    std::uint64_t n_total = 0;
    double filter_time = 0.0;   // ms
    double pruning_rate = 0.0;  // 1 - n_valid / n_total
    double pe_score = 0.0;      // pruning_rate / filter_time
    PathId path_id = 0;
};

// Feature layout shared by annotation and plan ranking:
// [0..4] global length shares, [5] label-sequence diversity, [6] mean degree,
// [7] max degree, [8] power-law exponent, [9] path length,
// [10] label key bucket, [11] cross-shard flag, [12..14] degree seq
// mean/min/max.
std::vector<double> pe_features(const GlobalFeatures& gf, std::size_t path_len,
                                const LabelKey& key, bool cross_shard,
                                std::span<const std::uint32_t> degree_seq);

/// Runs the dominance+label filter of each sampled path against every shard
/// index, measuring candidates and simulated filter time. Path ids are
/// positions in the enumeration order of `all_paths`.
/// Paths whose length bucket is empty in every index are skipped.
std::vector<PESample> annotate_samples(std::span<const PathInstance> all_paths,
                                       std::span<const PathId> sampled_ids,
                                       const LabeledGraph& g,
                                       std::span<const ARTree> shard_indexes,
                                       const GlobalFeatures& gf);

// Deterministic 1% sample (at least 1000, at most all) of path ids.
std::vector<PathId> sample_paths(std::size_t path_count, std::uint64_t seed);

GBDTModel train_pe_model(std::span<const PESample> samples, std::uint32_t num_trees,
                         const std::map<PathId, double>& workload_freq);

} // namespace pathmatch

#endif
