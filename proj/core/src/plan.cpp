#include "pathmatch/plan.hpp"

#include <algorithm>
#include <set>

#include "pathmatch/paths.hpp"
#include "pathmatch/pe_score.hpp"

namespace pathmatch {

namespace {

constexpr std::size_t kMaxCoverEdges = 5;

struct CoverSearch {
    const LabeledGraph& g;
    const std::set<Edge>& covered;
    std::vector<VertexId> best;

    bool uncovered(VertexId a, VertexId b) const {
        return covered.find(a < b ? Edge{a, b} : Edge{b, a}) == covered.end();
    }

    void consider(const std::vector<VertexId>& left, const std::vector<VertexId>& right) {
        // left runs away from the seed's first endpoint, right away from the
        // second; stitch them into one walk.
        std::vector<VertexId> path(left.rbegin(), left.rend());
        path.insert(path.end(), right.begin(), right.end());
        std::vector<VertexId> canon = canonical_orientation(path);
        if (canon.size() > best.size() || (canon.size() == best.size() && canon < best))
            best = std::move(canon);
    }

    bool contains(const std::vector<VertexId>& seq, VertexId v) const {
        return std::find(seq.begin(), seq.end(), v) != seq.end();
    }

    void extend_left(std::vector<VertexId>& left, const std::vector<VertexId>& right) {
        consider(left, right);
        if (left.size() + right.size() > kMaxCoverEdges)
            return;
        const VertexId tip = left.back();
        for (VertexId w : g.neighbors(tip)) {
            if (!uncovered(tip, w) || contains(left, w) || contains(right, w))
                continue;
            left.push_back(w);
            extend_left(left, right);
            left.pop_back();
        }
    }

    void extend_right(std::vector<VertexId>& left, std::vector<VertexId>& right) {
        extend_left(left, right);
        if (left.size() + right.size() > kMaxCoverEdges)
            return;
        const VertexId tip = right.back();
        for (VertexId w : g.neighbors(tip)) {
            if (!uncovered(tip, w) || contains(left, w) || contains(right, w))
                continue;
            right.push_back(w);
            extend_right(left, right);
            right.pop_back();
        }
    }
};

} // namespace

std::vector<std::vector<VertexId>> cover_paths(const QueryGraph& q) {
    const LabeledGraph& g = q.graph();
    const std::vector<Edge> edges = g.edges();
    std::set<Edge> covered;

    std::vector<std::vector<VertexId>> out;
    for (const Edge& seed : edges) {
        if (covered.count(seed))
            continue;
        CoverSearch search{g, covered, {}};
        std::vector<VertexId> left{seed.first};
        std::vector<VertexId> right{seed.second};
        search.extend_right(left, right);

        for (std::size_t i = 0; i + 1 < search.best.size(); ++i) {
            const VertexId a = search.best[i], b = search.best[i + 1];
            covered.insert(a < b ? Edge{a, b} : Edge{b, a});
        }
        out.push_back(std::move(search.best));
    }
    return out;
}

std::vector<std::uint32_t> candidate_shards(const EmbeddingVec& emb, std::size_t len,
                                            std::span<const MBRSummary> routing) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < routing.size(); ++s) {
        const MBRSummary& sum = routing[s];
        if (len < 1 || len > sum.length_counts.size())
            continue;
        if (sum.length_counts[len - 1] == 0 || !dominates(sum.mbr.hi, emb))
            continue;
        out.push_back(s);
    }
    return out;
}

QueryPlan rank_plan(const QueryGraph& q, const GBDTModel* model, const GlobalFeatures& gf,
                    std::span<const MBRSummary> routing, std::uint32_t data_max_degree) {
    const LabeledGraph& g = q.graph();
    std::vector<PlanPath> paths;
    for (std::vector<VertexId>& walk : cover_paths(q)) {
        PlanPath p;
        p.query_vertices = std::move(walk);
        p.degree_seq.reserve(p.query_vertices.size());
        for (VertexId v : p.query_vertices)
            p.degree_seq.push_back(g.degree(v));
        p.key = label_key(p.query_vertices, g);
        p.embedding = dominance_embedding(p.degree_seq, data_max_degree);

        const std::size_t len = p.length();
        const std::vector<std::uint32_t> shards = candidate_shards(p.embedding, len, routing);
        std::uint64_t best_count = 0;
        bool have_main = false;
        for (std::uint32_t s : shards) {
            const std::uint64_t cnt = routing[s].length_counts[len - 1];
            if (!have_main || cnt > best_count) {
                have_main = true;
                best_count = cnt;
                p.main_shard = s;
            }
        }
        p.cross_shard = shards.size() >= 2;

        if (model)
            p.pe_pred = model->predict(
                pe_features(gf, len, p.key, p.cross_shard, p.degree_seq));
        paths.push_back(std::move(p));
    }

    // Descending predicted effectiveness, extraction order as tiebreak.
    std::vector<std::size_t> order(paths.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return paths[a].pe_pred > paths[b].pe_pred;
    });

    // Dependency pass: among vertex-sharing pairs the shorter path must run
    // first; realized as a topological pick that otherwise follows `order`.
    auto shares_vertex = [&](const PlanPath& a, const PlanPath& b) {
        for (VertexId v : a.query_vertices)
            for (VertexId w : b.query_vertices)
                if (v == w)
                    return true;
        return false;
    };
    std::vector<std::size_t> sequenced;
    std::vector<bool> done(paths.size(), false);
    while (sequenced.size() < paths.size()) {
        for (std::size_t i : order) {
            if (done[i])
                continue;
            bool blocked = false;
            for (std::size_t j = 0; j < paths.size() && !blocked; ++j)
                if (!done[j] && j != i && shares_vertex(paths[i], paths[j]) &&
                    paths[j].length() < paths[i].length())
                    blocked = true;
            if (!blocked) {
                sequenced.push_back(i);
                done[i] = true;
                break;
            }
        }
    }

    // Group by main shard in order of first appearance, preserving the
    // sequenced order inside each group.
    QueryPlan plan;
    std::vector<std::uint32_t> shard_order;
    for (std::size_t i : sequenced)
        if (std::find(shard_order.begin(), shard_order.end(), paths[i].main_shard) ==
            shard_order.end())
            shard_order.push_back(paths[i].main_shard);
    for (std::uint32_t s : shard_order)
        for (std::size_t i : sequenced)
            if (paths[i].main_shard == s)
                plan.paths.push_back(paths[i]);
    return plan;
}

} // namespace pathmatch
