#include "pathmatch/shard_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pathmatch/embedding.hpp"

namespace pathmatch {

ShardFeatureSet shard_features(const Shard& shard, const LabeledGraph& g,
                               std::span<const PathInstance> shard_paths) {
    ShardFeatureSet fs;
    std::set<LabelKey> keys;
    for (const PathInstance& p : shard_paths) {
        const std::size_t len = p.length();
        if (len >= 1 && len <= 5) {
            ++fs.n_l[len - 1];
            ++fs.n_total;
        }
        keys.insert(label_key(p.vertices, g));
    }
    fs.d_t = keys.size();
    if (fs.n_total > 0)
        for (int l = 0; l < 5; ++l)
            fs.r[l] = static_cast<double>(fs.n_l[l]) / static_cast<double>(fs.n_total);

    std::map<std::uint32_t, std::uint64_t> degree_hist;
    double dsum = 0.0;
    for (VertexId v : shard.vertices) {
        const std::uint32_t d = g.degree(v);
        dsum += d;
        fs.d_max = std::max(fs.d_max, static_cast<double>(d));
        if (d >= 1)
            ++degree_hist[d];
    }
    fs.d_mean = shard.vertices.empty() ? 0.0 : dsum / static_cast<double>(shard.vertices.size());

    // Least-squares slope of log P(d) against log d; the exponent is its
    // negation. Needs at least two distinct positive degrees.
    if (degree_hist.size() >= 2) {
        std::uint64_t counted = 0;
        for (const auto& [d, c] : degree_hist)
            counted += c;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(degree_hist.size());
        for (const auto& [d, c] : degree_hist) {
            const double x = std::log(static_cast<double>(d));
            const double y = std::log(static_cast<double>(c) / static_cast<double>(counted));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        if (denom > 0.0) {
            fs.gamma = -(n * sxy - sx * sy) / denom;
            fs.gamma_valid = true;
        }
    }
    return fs;
}

GlobalFeatures global_features(std::span<const ShardFeatureSet> sets) {
    GlobalFeatures gf;
    if (sets.empty())
        return gf;

    for (int l = 0; l < 5; ++l) {
        std::uint64_t nl = 0;
        double acc = 0.0;
        for (const auto& s : sets) {
            nl += s.n_l[l];
            acc += static_cast<double>(s.n_l[l]) * s.r[l];
        }
        gf.r[l] = nl > 0 ? acc / static_cast<double>(nl) : 0.0;
    }

    std::uint64_t total = 0;
    for (const auto& s : sets)
        total += s.n_total;
    for (const auto& s : sets) {
        const double w = total > 0 ? static_cast<double>(s.n_total) / static_cast<double>(total)
                                   : 1.0 / static_cast<double>(sets.size());
        gf.d_t += w * static_cast<double>(s.d_t);
        gf.d_mean += w * s.d_mean;
        gf.gamma += w * s.gamma;
        gf.d_max = std::max(gf.d_max, s.d_max);
    }
    return gf;
}

} // namespace pathmatch
