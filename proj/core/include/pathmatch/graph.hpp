#ifndef PATHMATCH_GRAPH_HPP
#define PATHMATCH_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace pathmatch {

using VertexId = std::uint32_t;
using LabelId = std::uint32_t;

using Edge = std::pair<VertexId, VertexId>;

/// Undirected vertex-labeled graph with dense ids 0..n-1.
/// Invariants enforced at construction: symmetric adjacency, no self-loops,
/// no duplicate edges, exactly one label per vertex, labels < label_count.
class LabeledGraph {
public:
    LabeledGraph() = default;

    // Throws std::invalid_argument on any invariant violation.
    static LabeledGraph build(std::size_t label_count,
                              std::vector<LabelId> labels,
                              const std::vector<Edge>& edges);

    std::size_t vertex_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t label_count() const { return label_count_; }

    LabelId label(VertexId v) const { return labels_[v]; }
    std::span<const VertexId> neighbors(VertexId v) const { return adj_[v]; }
    std::uint32_t degree(VertexId v) const { return static_cast<std::uint32_t>(adj_[v].size()); }
    std::uint32_t max_degree() const { return max_degree_; }

    bool has_edge(VertexId u, VertexId v) const;
    bool is_connected() const;

    // All edges as (u, v) with u < v, sorted.
    std::vector<Edge> edges() const;

    double average_degree() const {
        return adj_.empty() ? 0.0 : 2.0 * static_cast<double>(edge_count_) / static_cast<double>(adj_.size());
    }

private:
    std::vector<std::vector<VertexId>> adj_;
    std::vector<LabelId> labels_;
    std::size_t label_count_ = 0;
    std::size_t edge_count_ = 0;
    std::uint32_t max_degree_ = 0;
};

/// Connected query graph, 2..16 vertices. Same structural invariants as
/// LabeledGraph; the size cap keeps the brute-force oracle tractable.
class QueryGraph {
public:
    static constexpr std::size_t kMaxVertices = 16;

    explicit QueryGraph(LabeledGraph g);

    const LabeledGraph& graph() const { return g_; }
    std::size_t vertex_count() const { return g_.vertex_count(); }
    std::size_t edge_count() const { return g_.edge_count(); }
    LabelId label(VertexId v) const { return g_.label(v); }
    std::span<const VertexId> neighbors(VertexId v) const { return g_.neighbors(v); }
    std::uint32_t degree(VertexId v) const { return g_.degree(v); }

private:
    LabeledGraph g_;
};

// Text format:
//   <|V|> <|L|>
//   v <id> <label>     one line per vertex (ids may be arbitrary, compacted
//                      to 0..|V|-1 in order of appearance)
//   e <u> <v>          one line per edge
// '#' lines and blank lines are ignored.
LabeledGraph read_graph(std::istream& in);
LabeledGraph load_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const LabeledGraph& g);

// Query container: blocks in the same format separated by blank lines.
std::vector<QueryGraph> read_queries(std::istream& in);
std::vector<QueryGraph> load_queries(const std::filesystem::path& path);
void write_queries(std::ostream& out, std::span<const QueryGraph> queries);

} // namespace pathmatch

#endif
