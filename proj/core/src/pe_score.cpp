#include "pathmatch/pe_score.hpp"

#include <algorithm>

#include "pathmatch/embedding.hpp"
#include "pathmatch/rng.hpp"

namespace pathmatch {

std::uint32_t adaptive_tree_count(std::uint64_t n_sample) {
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(50 + n_sample / 1000, 300));
}

std::vector<double> pe_features(const GlobalFeatures& gf, std::size_t path_len,
                                const LabelKey& key, bool cross_shard,
                                std::span<const std::uint32_t> degree_seq) {
    std::vector<double> f;
    f.reserve(kPEFeatureCount);
    for (int l = 0; l < 5; ++l)
        f.push_back(gf.r[l]);
    f.push_back(gf.d_t);
    f.push_back(gf.d_mean);
    f.push_back(gf.d_max);
    f.push_back(gf.gamma);
    f.push_back(static_cast<double>(path_len));
    f.push_back(static_cast<double>(label_key_hash(key) % 1024));
    f.push_back(cross_shard ? 1.0 : 0.0);
    double mn = 0.0, mx = 0.0, mean = 0.0;
    if (!degree_seq.empty()) {
        mn = mx = degree_seq[0];
        for (std::uint32_t d : degree_seq) {
            mn = std::min(mn, static_cast<double>(d));
            mx = std::max(mx, static_cast<double>(d));
            mean += d;
        }
        mean /= static_cast<double>(degree_seq.size());
    }
    f.push_back(mean);
    f.push_back(mn);
    f.push_back(mx);
    return f;
}

std::vector<PathId> sample_paths(std::size_t path_count, std::uint64_t seed) {
    const std::size_t want =
        std::min(path_count, std::max<std::size_t>(path_count / 100, 1000));
    std::vector<PathId> idx(path_count);
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    Rng rng(derive_seed(seed, "pe-sample"));
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.next_below(i)]);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<PESample> annotate_samples(std::span<const PathInstance> all_paths,
                                       std::span<const PathId> sampled_ids,
                                       const LabeledGraph& g,
                                       std::span<const ARTree> shard_indexes,
                                       const GlobalFeatures& gf) {
    // Same-length path totals over every index, the candidate universe of a
    // length-l probe.
    std::array<std::uint64_t, 5> length_totals{};
    for (const ARTree& t : shard_indexes) {
        const MBRSummary s = t.summary();
        for (int l = 0; l < 5; ++l)
            length_totals[l] += s.length_counts[l];
    }

    std::vector<PESample> out;
    for (PathId pid : sampled_ids) {
        const PathInstance& p = all_paths[pid];
        const std::size_t len = p.length();
        if (len < 1 || len > 5 || length_totals[len - 1] == 0)
            continue;

        const EmbeddingVec q = dominance_embedding(p.degree_seq, g.max_degree());
        const LabelKey key = label_key(p.vertices, g);

        std::uint64_t n_valid = 0, nodes = 0, shards_hit = 0;
        for (const ARTree& t : shard_indexes) {
            const ARTree::FilterResult r = t.filter(q, key);
            n_valid += r.ids.size();
            nodes += r.nodes_visited;
            if (!r.ids.empty())
                ++shards_hit;
        }

        PESample s;
        s.path_id = pid;
        s.n_valid = n_valid;
        s.n_total = length_totals[len - 1];
        s.filter_time = filter_time_ms(nodes);
        s.pruning_rate =
            1.0 - static_cast<double>(n_valid) / static_cast<double>(s.n_total);
        s.pe_score = s.pruning_rate / s.filter_time;
        s.features = pe_features(gf, len, key, shards_hit >= 2, p.degree_seq);
        out.push_back(std::move(s));
    }
    return out;
}

GBDTModel train_pe_model(std::span<const PESample> samples, std::uint32_t num_trees,
                         const std::map<PathId, double>& workload_freq) {
    std::vector<std::vector<double>> rows;
    std::vector<double> y, w;
    rows.reserve(samples.size());
    for (const PESample& s : samples) {
        rows.push_back(s.features);
        y.push_back(s.pe_score);
        auto it = workload_freq.find(s.path_id);
        w.push_back(it == workload_freq.end() ? 1.0 : std::max(it->second, 1.0));
    }
    GBDTParams params;
    params.num_trees = num_trees;
    params.max_depth = 4;
    params.learning_rate = 0.1;
    return GBDTModel::train(rows, y, w, params);
}

} // namespace pathmatch
