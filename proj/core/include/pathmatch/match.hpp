#ifndef PATHMATCH_MATCH_HPP
#define PATHMATCH_MATCH_HPP

#include <vector>

#include "pathmatch/graph.hpp"

namespace pathmatch {

/// Injective, label- and edge-preserving assignment of query vertices to data
/// vertices. map[q] is the data vertex matched to query vertex q.
struct MatchMapping {
    std::vector<VertexId> map;

    bool operator==(const MatchMapping&) const = default;
    bool operator<(const MatchMapping& o) const { return map < o.map; }
};

// Independent re-check of both matching conditions plus injectivity.
bool mapping_valid(const LabeledGraph& g, const QueryGraph& q, const MatchMapping& m);

// Exhaustive backtracking oracle. No pruning beyond label/degree feasibility.
// Returns the full mapping set sorted lexicographically (set semantics).
// Throws std::invalid_argument if |V(q)| exceeds QueryGraph::kMaxVertices.
std::vector<MatchMapping> brute_force_match(const LabeledGraph& g, const QueryGraph& q);

} // namespace pathmatch

#endif
