#include "pathmatch/match.hpp"

#include <algorithm>
#include <stdexcept>

namespace pathmatch {

bool mapping_valid(const LabeledGraph& g, const QueryGraph& q, const MatchMapping& m) {
    if (m.map.size() != q.vertex_count()) return false;
    std::vector<VertexId> image = m.map;
    std::sort(image.begin(), image.end());
    if (std::adjacent_find(image.begin(), image.end()) != image.end()) return false;
    for (VertexId u = 0; u < q.vertex_count(); ++u) {
        if (m.map[u] >= g.vertex_count()) return false;
        if (q.label(u) != g.label(m.map[u])) return false;
    }
    for (VertexId u = 0; u < q.vertex_count(); ++u) {
        for (VertexId v : q.neighbors(u)) {
            if (u < v && !g.has_edge(m.map[u], m.map[v])) return false;
        }
    }
    return true;
}

namespace {

void search(const LabeledGraph& g, const QueryGraph& q, VertexId next,
            std::vector<VertexId>& assignment, std::vector<char>& used,
            std::vector<MatchMapping>& out) {
    if (next == q.vertex_count()) {
        out.push_back(MatchMapping{assignment});
        return;
    }
    for (VertexId cand = 0; cand < g.vertex_count(); ++cand) {
        if (used[cand]) continue;
        if (g.label(cand) != q.label(next)) continue;
        if (g.degree(cand) < q.degree(next)) continue;
        bool ok = true;
        for (VertexId qn : q.neighbors(next)) {
            if (qn < next && !g.has_edge(assignment[qn], cand)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        used[cand] = 1;
        assignment[next] = cand;
        search(g, q, next + 1, assignment, used, out);
        used[cand] = 0;
    }
}

} // namespace

std::vector<MatchMapping> brute_force_match(const LabeledGraph& g, const QueryGraph& q) {
    if (q.vertex_count() > QueryGraph::kMaxVertices) {
        throw std::invalid_argument("oracle refuses queries above " +
                                    std::to_string(QueryGraph::kMaxVertices) + " vertices");
    }
    std::vector<MatchMapping> out;
    std::vector<VertexId> assignment(q.vertex_count(), 0);
    std::vector<char> used(g.vertex_count(), 0);
    search(g, q, 0, assignment, used, out);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace pathmatch
