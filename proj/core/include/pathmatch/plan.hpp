#ifndef PATHMATCH_PLAN_HPP
#define PATHMATCH_PLAN_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/artree.hpp"
#include "pathmatch/embedding.hpp"
#include "pathmatch/gbdt.hpp"
#include "pathmatch/graph.hpp"
#include "pathmatch/shard_features.hpp"

namespace pathmatch {

struct PlanPath {
    std::vector<VertexId> query_vertices;  // walk through the query graph
    std::vector<std::uint32_t> degree_seq;  // query-graph degrees along the walk
    LabelKey key;
    EmbeddingVec embedding{0.0, 0.0};
    double pe_pred = 0.0;
    bool cross_shard = false;
    std::uint32_t main_shard = 0;

    std::size_t length() const { return query_vertices.size() - 1; }
};

struct QueryPlan {
    std::vector<PlanPath> paths;  // execution order: grouped by main shard
};

/// Edge-disjoint path cover of the query: repeatedly take the longest unused
/// simple path (at most 5 edges) through the lowest-id uncovered edge.
/// Every query edge lands in exactly one path.
std::vector<std::vector<VertexId>> cover_paths(const QueryGraph& q);

/// Shards whose index may hold matches for a query path of the given length
/// and embedding: nonzero same-length count and an MBR upper corner that
/// dominates the query point. Ascending shard ids.
std::vector<std::uint32_t> candidate_shards(const EmbeddingVec& emb, std::size_t len,
                                            std::span<const MBRSummary> routing);

/// Rank the cover by predicted pruning effectiveness (descending), then apply
/// the dependency pass (shorter first among vertex-sharing pairs) and group
/// by main shard. `model` may be null: paths keep extraction order scores of
/// 0 and only the dependency/grouping passes apply. `routing` carries one
/// summary per shard for candidate-shard lookups; `data_max_degree` scales
/// query path embeddings into data space.
QueryPlan rank_plan(const QueryGraph& q, const GBDTModel* model, const GlobalFeatures& gf,
                    std::span<const MBRSummary> routing, std::uint32_t data_max_degree);

} // namespace pathmatch

#endif
