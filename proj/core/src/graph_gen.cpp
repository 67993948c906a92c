#include "pathmatch/graph_gen.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "pathmatch/errors.hpp"
#include "pathmatch/rng.hpp"

namespace pathmatch {

LabeledGraph generate_nws(std::uint32_t n, std::uint32_t k, double p_add,
                          std::uint32_t label_count, std::uint64_t seed) {
    if (k < 2 || k % 2 != 0 || n <= k) {
        throw ConfigError("NWS requires n > k >= 2 with k even");
    }
    if (p_add < 0.0 || p_add > 1.0) {
        throw ConfigError("NWS shortcut probability must be in [0, 1]");
    }
    if (label_count == 0) {
        throw ConfigError("label alphabet must be non-empty");
    }
    Rng rng(derive_seed(seed, "nws"));

    std::set<Edge> edge_set;
    for (VertexId v = 0; v < n; ++v) {
        for (std::uint32_t j = 1; j <= k / 2; ++j) {
            VertexId w = (v + j) % n;
            edge_set.insert({std::min(v, w), std::max(v, w)});
        }
    }
    for (VertexId v = 0; v < n; ++v) {
        if (!rng.next_bernoulli(p_add)) continue;
        // uniform non-neighbor; rejection sampling is fine on sparse graphs
        for (int tries = 0; tries < 64; ++tries) {
            VertexId w = rng.next_u32_below(n);
            if (w == v) continue;
            Edge e{std::min(v, w), std::max(v, w)};
            if (edge_set.count(e)) continue;
            edge_set.insert(e);
            break;
        }
    }

    std::vector<LabelId> labels(n);
    for (auto& l : labels) l = rng.next_u32_below(label_count);

    return LabeledGraph::build(label_count, std::move(labels),
                               std::vector<Edge>(edge_set.begin(), edge_set.end()));
}

QueryGraph sample_query_graph(const LabeledGraph& g, const QuerySampleParams& params,
                              std::uint64_t seed) {
    const std::uint32_t n_q = params.n_q;
    if (n_q < 2 || n_q > QueryGraph::kMaxVertices) {
        throw ConfigError("query size must be in [2, 16]");
    }
    if (g.vertex_count() < n_q) {
        throw SamplingError("data graph smaller than requested query");
    }
    Rng rng(derive_seed(seed, "qsample"));
    const std::size_t walk_cap = 64 * static_cast<std::size_t>(n_q);

    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        VertexId cur = rng.next_u32_below(static_cast<std::uint32_t>(g.vertex_count()));
        std::vector<VertexId> collected{cur};
        std::vector<char> in_set(g.vertex_count(), 0);
        in_set[cur] = 1;
        std::size_t steps = 0;
        while (collected.size() < n_q && steps++ < walk_cap) {
            auto nb = g.neighbors(cur);
            if (nb.empty()) break;
            cur = nb[rng.next_u32_below(static_cast<std::uint32_t>(nb.size()))];
            if (!in_set[cur]) {
                in_set[cur] = 1;
                collected.push_back(cur);
            }
        }
        if (collected.size() < n_q) continue;

        std::sort(collected.begin(), collected.end());
        std::vector<LabelId> labels(n_q);
        std::vector<Edge> edges;
        for (std::uint32_t i = 0; i < n_q; ++i) {
            labels[i] = g.label(collected[i]);
            for (std::uint32_t j = i + 1; j < n_q; ++j) {
                if (g.has_edge(collected[i], collected[j])) {
                    edges.emplace_back(i, j);
                }
            }
        }
        double avg_deg = 2.0 * static_cast<double>(edges.size()) / static_cast<double>(n_q);
        if (avg_deg < params.avg_deg_lo || avg_deg > params.avg_deg_hi) continue;

        LabeledGraph sub = LabeledGraph::build(g.label_count(), std::move(labels), edges);
        if (!sub.is_connected()) continue;
        return QueryGraph(std::move(sub));
    }
    throw SamplingError("query sampling exhausted after " + std::to_string(params.max_attempts) +
                        " attempts (degree range [" + std::to_string(params.avg_deg_lo) + ", " +
                        std::to_string(params.avg_deg_hi) + "])");
}

} // namespace pathmatch
