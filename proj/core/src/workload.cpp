#include "pathmatch/workload.hpp"

#include <algorithm>
#include <cmath>

#include "pathmatch/cache.hpp"
#include "pathmatch/embedding.hpp"
#include "pathmatch/errors.hpp"
#include "pathmatch/graph_gen.hpp"
#include "pathmatch/plan.hpp"

namespace pathmatch {

ZipfSampler::ZipfSampler(std::size_t n, double s) {
    if (n == 0)
        throw ConfigError("ZipfSampler: empty universe");
    cdf_.resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += 1.0 / std::pow(static_cast<double>(k + 1), s);
        cdf_[k] = acc;
    }
    for (double& v : cdf_)
        v /= acc;
}

std::size_t ZipfSampler::sample(Rng& rng) const {
    const double u = rng.next_double();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? cdf_.size() - 1
                            : static_cast<std::size_t>(it - cdf_.begin());
}

CacheWorkload generate_cache_workload(const CacheWorkloadParams& params,
                                      std::size_t query_count, std::uint64_t seed) {
    const std::uint64_t needed =
        static_cast<std::uint64_t>(params.bundle_count) * params.bundle_size;
    if (params.universe < needed)
        throw ConfigError("generate_cache_workload: universe smaller than bundles");

    CacheWorkload out;
    Rng rng(derive_seed(seed, "cache-workload"));

    // Rank -> path id mapping via a seeded permutation, so Zipf-hot ranks land
    // on scattered ids.
    std::vector<PathId> perm(params.universe);
    for (std::size_t i = 0; i < perm.size(); ++i)
        perm[i] = static_cast<PathId>(i);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.next_below(i)]);

    out.bundles.resize(params.bundle_count);
    for (std::uint32_t b = 0; b < params.bundle_count; ++b) {
        auto& bundle = out.bundles[b];
        bundle.reserve(params.bundle_size);
        // Bundles occupy the hottest permuted ranks so they recur often.
        for (std::uint32_t k = 0; k < params.bundle_size; ++k)
            bundle.push_back(perm[static_cast<std::size_t>(b) * params.bundle_size + k]);
    }

    const ZipfSampler zipf(params.universe, params.zipf_s);
    const ZipfSampler bundle_pick(params.bundle_count, 1.0);
    out.queries.reserve(query_count);
    for (std::size_t qi = 0; qi < query_count; ++qi) {
        std::vector<PathId> q;
        if (rng.next_double() < params.bundle_prob) {
            q = out.bundles[bundle_pick.sample(rng)];
        } else {
            q.reserve(params.paths_per_query);
            for (std::uint32_t k = 0; k < params.paths_per_query; ++k)
                q.push_back(perm[zipf.sample(rng)]);
            std::sort(q.begin(), q.end());
            q.erase(std::unique(q.begin(), q.end()), q.end());
        }
        out.queries.push_back(std::move(q));
    }
    return out;
}

WarmupResult warmup_pseudo_queries(const LabeledGraph& g,
                                   std::span<const ARTree> shard_indexes,
                                   std::uint32_t data_max_degree, CorrState& state,
                                   std::uint32_t count, std::uint64_t seed,
                                   std::int64_t now_us) {
    WarmupResult res;
    const std::uint32_t m = static_cast<std::uint32_t>(shard_indexes.size());
    std::vector<double> prune_sum(m, 0.0);
    std::vector<std::uint64_t> prune_probes(m, 0);
    AccessWindow window;

    for (std::uint32_t qi = 0; qi < count; ++qi) {
        const std::uint64_t qseed = derive_seed(seed, "warmup") + qi;
        QueryGraph query = [&] {
            QuerySampleParams params;  // average degree 3..7 by default
            try {
                return sample_query_graph(g, params, qseed);
            } catch (const SamplingError&) {
                ++res.sampler_fallbacks;
                params.avg_deg_lo = 0.0;
                params.avg_deg_hi = static_cast<double>(params.n_q);
                return sample_query_graph(g, params, qseed);
            }
        }();

        std::vector<std::uint32_t> touched;
        std::vector<PathId> accessed;
        for (const std::vector<VertexId>& walk : cover_paths(query)) {
            std::vector<std::uint32_t> degree_seq;
            degree_seq.reserve(walk.size());
            for (VertexId v : walk)
                degree_seq.push_back(query.graph().degree(v));
            const EmbeddingVec emb = dominance_embedding(degree_seq, data_max_degree);
            const LabelKey key = label_key(walk, query.graph());

            for (std::uint32_t s = 0; s < m; ++s) {
                if (shard_indexes[s].empty())
                    continue;
                const ARTree::FilterResult r = shard_indexes[s].filter(emb, key);
                ++prune_probes[s];
                prune_sum[s] += 1.0 - static_cast<double>(r.ids.size()) /
                                          static_cast<double>(shard_indexes[s].size());
                if (!r.ids.empty()) {
                    touched.push_back(s);
                    for (PathId id : r.ids) {
                        ++res.path_access_count[id];
                        accessed.push_back(id);
                    }
                }
            }
        }

        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (std::size_t a = 0; a < touched.size(); ++a)
            for (std::size_t b = a + 1; b < touched.size(); ++b)
                state.record_co_query(touched[a], touched[b], now_us);

        window.record_query(accessed);

        // One feature row per pseudo-query: means over the accessed paths,
        // counted as a "hit" when some accessed path repeats inside the
        // window. Only the first-100 rows feed the initial weight split.
        FeatureSnapshot snap;
        if (!accessed.empty()) {
            const FeatureWindowStats stats{window.max_freq(), window.max_co_count(), 30.0};
            double repeat = 0.0;
            for (PathId id : accessed) {
                const FeatureVec f = feature_snapshot(
                    {window.freq(id), window.co_count(id), 0.0, 0, 0}, stats);
                for (int k = 0; k < 4; ++k)
                    snap.features[k] += f[k];
                if (window.freq(id) > 1.0)
                    repeat = 1.0;
            }
            for (int k = 0; k < 4; ++k)
                snap.features[k] /= static_cast<double>(accessed.size());
            snap.hit = repeat;
            snap.latency_ms = 1.0 + 0.1 * static_cast<double>(accessed.size());
        }
        res.snapshots.push_back(snap);
        ++res.executed;
    }

    res.shard_prune_rate.assign(m, 0.0);
    for (std::uint32_t s = 0; s < m; ++s)
        if (prune_probes[s] > 0)
            res.shard_prune_rate[s] = prune_sum[s] / static_cast<double>(prune_probes[s]);
    return res;
}

} // namespace pathmatch
