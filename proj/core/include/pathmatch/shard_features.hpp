#ifndef PATHMATCH_SHARD_FEATURES_HPP
#define PATHMATCH_SHARD_FEATURES_HPP

#include <array>
#include <cstdint>
#include <span>

#include "pathmatch/graph.hpp"
#include "pathmatch/partition.hpp"
#include "pathmatch/paths.hpp"

namespace pathmatch {

struct ShardFeatureSet {
    std::array<double, 5> r{};           // share of paths at length 1..5
    std::array<std::uint64_t, 5> n_l{};  // path counts per length
    std::uint64_t n_total = 0;
    std::uint64_t d_t = 0;  // distinct canonical label sequences
    double d_mean = 0.0;
    double d_max = 0.0;
    double gamma = 0.0;  // power-law exponent of the degree distribution
    bool gamma_valid = false;
};

struct GlobalFeatures {
    std::array<double, 5> r{};
    double d_t = 0.0;
    double d_mean = 0.0;
    double d_max = 0.0;
    double gamma = 0.0;
};

// Degrees are always the data-graph ones, so boundary vertices keep the
// degree mass of their cross-shard edges.
ShardFeatureSet shard_features(const Shard& shard, const LabeledGraph& g,
                               std::span<const PathInstance> shard_paths);

GlobalFeatures global_features(std::span<const ShardFeatureSet> sets);

} // namespace pathmatch

#endif
