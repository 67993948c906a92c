#ifndef PATHMATCH_EMBEDDING_HPP
#define PATHMATCH_EMBEDDING_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/graph.hpp"
#include "pathmatch/paths.hpp"

namespace pathmatch {

/// 2-d dominance embedding, both components in [0, 1].
///
/// o(p) = ( sum_i deg(v_i) / ((len+1) * D_max),  min_i deg(v_i) / D_max )
///
/// Monotone in every per-position degree, so if a query path maps onto a data
/// path position-by-position with deg_q(u_i) <= deg_G(v_i), then
/// o(p_q) <= o(p_z) element-wise. That is the whole no-false-dismissal
/// contract the index relies on.
using EmbeddingVec = std::array<double, 2>;

inline bool dominates(const EmbeddingVec& hi, const EmbeddingVec& lo) {
    return hi[0] >= lo[0] && hi[1] >= lo[1];
}

// max_degree is D_max of the *data* graph; an edgeless graph (D_max = 0)
// embeds everything at the origin.
EmbeddingVec dominance_embedding(std::span<const std::uint32_t> degree_seq,
                                 std::uint32_t max_degree);

inline EmbeddingVec dominance_embedding(const PathInstance& p, const LabeledGraph& g) {
    return dominance_embedding(p.degree_seq, g.max_degree());
}

/// Reversal-canonical vertex-label sequence; equality is a necessary matching
/// condition between a query path and a data path.
using LabelKey = std::vector<LabelId>;

LabelKey label_key(std::span<const VertexId> vertices, const LabeledGraph& g);
LabelKey label_key(std::span<const LabelId> labels);

// FNV-1a over the key, for hash-map grouping.
std::uint64_t label_key_hash(const LabelKey& key);

} // namespace pathmatch

#endif
