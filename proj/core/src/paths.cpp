#include "pathmatch/paths.hpp"

#include <algorithm>
#include <stdexcept>

namespace pathmatch {

std::vector<VertexId> canonical_orientation(std::vector<VertexId> seq) {
    if (seq.size() < 2) return seq;
    if (seq.front() > seq.back()) {
        std::reverse(seq.begin(), seq.end());
    } else if (seq.front() == seq.back() &&
               std::lexicographical_compare(seq.rbegin(), seq.rend(), seq.begin(), seq.end())) {
        std::reverse(seq.begin(), seq.end());
    }
    return seq;
}

namespace {

void extend(const LabeledGraph& g, std::vector<VertexId>& cur, std::vector<char>& on_path,
            int max_len, std::vector<PathInstance>& out) {
    if (cur.size() >= 2 && cur.front() < cur.back()) {
        PathInstance p;
        p.vertices = cur;
        p.degree_seq.reserve(cur.size());
        for (VertexId v : cur) p.degree_seq.push_back(g.degree(v));
        out.push_back(std::move(p));
    }
    if (static_cast<int>(cur.size()) - 1 >= max_len) return;
    for (VertexId w : g.neighbors(cur.back())) {
        if (on_path[w]) continue;
        on_path[w] = 1;
        cur.push_back(w);
        extend(g, cur, on_path, max_len, out);
        cur.pop_back();
        on_path[w] = 0;
    }
}

} // namespace

std::vector<PathInstance> enumerate_paths(const LabeledGraph& g, int max_len) {
    if (max_len < 1 || max_len > 5) {
        throw std::invalid_argument("max_len must be in [1, 5]");
    }
    std::vector<PathInstance> out;
    std::vector<char> on_path(g.vertex_count(), 0);
    std::vector<VertexId> cur;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        on_path[v] = 1;
        cur.push_back(v);
        extend(g, cur, on_path, max_len, out);
        cur.pop_back();
        on_path[v] = 0;
    }
    return out;
}

} // namespace pathmatch
