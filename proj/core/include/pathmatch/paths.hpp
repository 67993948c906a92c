#ifndef PATHMATCH_PATHS_HPP
#define PATHMATCH_PATHS_HPP

#include <cstdint>
#include <vector>

#include "pathmatch/graph.hpp"

namespace pathmatch {

using PathId = std::uint64_t;

/// A simple path stored in canonical orientation: the endpoint with the
/// smaller vertex id comes first. degree_seq holds per-vertex degrees in the
/// graph the path was enumerated from (full data graph for data paths,
/// query graph for query paths).
struct PathInstance {
    std::vector<VertexId> vertices;
    std::vector<std::uint32_t> degree_seq;
    std::uint32_t home_shard = 0;

    std::size_t length() const { return vertices.size() - 1; }
};

// Canonical orientation: smaller endpoint first; ties (impossible for simple
// paths of length >= 1) fall back to lexicographic order of the sequence.
std::vector<VertexId> canonical_orientation(std::vector<VertexId> seq);

// All simple paths of edge-length 1..max_len, one canonical orientation each,
// in deterministic (start vertex, DFS) order. 1 <= max_len <= 5.
std::vector<PathInstance> enumerate_paths(const LabeledGraph& g, int max_len);

} // namespace pathmatch

#endif
