#include "pathmatch/embedding.hpp"

#include <algorithm>
#include <stdexcept>

namespace pathmatch {

EmbeddingVec dominance_embedding(std::span<const std::uint32_t> degree_seq,
                                 std::uint32_t max_degree) {
    if (degree_seq.empty())
        throw std::invalid_argument("dominance_embedding: empty degree sequence");
    if (max_degree == 0)
        return {0.0, 0.0};

    std::uint64_t sum = 0;
    std::uint32_t mn = degree_seq.front();
    for (std::uint32_t d : degree_seq) {
        sum += d;
        mn = std::min(mn, d);
    }
    const double dmax = static_cast<double>(max_degree);
    // degree_seq has len+1 entries for a path of length len.
    const double avg = static_cast<double>(sum) / (static_cast<double>(degree_seq.size()) * dmax);
    return {avg, static_cast<double>(mn) / dmax};
}

LabelKey label_key(std::span<const LabelId> labels) {
    LabelKey fwd(labels.begin(), labels.end());
    LabelKey rev(labels.rbegin(), labels.rend());
    return fwd <= rev ? fwd : rev;
}

LabelKey label_key(std::span<const VertexId> vertices, const LabeledGraph& g) {
    std::vector<LabelId> labels;
    labels.reserve(vertices.size());
    for (VertexId v : vertices)
        labels.push_back(g.label(v));
    return label_key(labels);
}

std::uint64_t label_key_hash(const LabelKey& key) {
    std::uint64_t h = 1469598103934665603ULL;
    for (LabelId l : key) {
        for (int i = 0; i < 4; ++i) {
            h ^= (l >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

} // namespace pathmatch
