#ifndef PATHMATCH_GRAPH_GEN_HPP
#define PATHMATCH_GRAPH_GEN_HPP

#include <cstdint>

#include "pathmatch/graph.hpp"

namespace pathmatch {

// Newman-Watts-Strogatz small world: ring lattice (each vertex linked to the
// k/2 nearest neighbors on each side) plus random shortcuts added with
// probability p_add per vertex. Shortcuts are added, never rewired, so the
// ring is always preserved. Labels drawn uniformly from the alphabet.
// Requires n > k >= 2, k even, 0 <= p_add <= 1.
LabeledGraph generate_nws(std::uint32_t n, std::uint32_t k, double p_add,
                          std::uint32_t label_count, std::uint64_t seed);

struct QuerySampleParams {
    std::uint32_t n_q = 6;
    double avg_deg_lo = 3.0;
    double avg_deg_hi = 7.0;
    int max_attempts = 100;
};

// Induced subgraph on the distinct vertices collected by a seeded random walk,
// re-sampled until the average degree falls inside [avg_deg_lo, avg_deg_hi].
// Throws SamplingError after max_attempts failed walks.
QueryGraph sample_query_graph(const LabeledGraph& g, const QuerySampleParams& params,
                              std::uint64_t seed);

} // namespace pathmatch

#endif
