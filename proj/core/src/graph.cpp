#include "pathmatch/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "pathmatch/errors.hpp"

namespace pathmatch {

LabeledGraph LabeledGraph::build(std::size_t label_count,
                                 std::vector<LabelId> labels,
                                 const std::vector<Edge>& edges) {
    const std::size_t n = labels.size();
    for (LabelId l : labels) {
        if (l >= label_count) {
            throw std::invalid_argument("vertex label " + std::to_string(l) +
                                        " outside alphabet of size " + std::to_string(label_count));
        }
    }
    LabeledGraph g;
    g.labels_ = std::move(labels);
    g.label_count_ = label_count;
    g.adj_.assign(n, {});
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) {
            throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(u) +
                                        "," + std::to_string(v) + ")");
        }
        if (u == v) {
            throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        }
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto& nb = g.adj_[v];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
            throw std::invalid_argument("duplicate edge at vertex " + std::to_string(v));
        }
        g.max_degree_ = std::max(g.max_degree_, static_cast<std::uint32_t>(nb.size()));
    }
    g.edge_count_ = edges.size();
    return g;
}

bool LabeledGraph::has_edge(VertexId u, VertexId v) const {
    const auto& nb = adj_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

bool LabeledGraph::is_connected() const {
    if (adj_.empty()) return true;
    std::vector<char> seen(adj_.size(), 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (VertexId w : adj_[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                stack.push_back(w);
            }
        }
    }
    return visited == adj_.size();
}

std::vector<Edge> LabeledGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (VertexId u = 0; u < adj_.size(); ++u) {
        for (VertexId v : adj_[u]) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

QueryGraph::QueryGraph(LabeledGraph g) : g_(std::move(g)) {
    if (g_.vertex_count() < 2 || g_.vertex_count() > kMaxVertices) {
        throw std::invalid_argument("query graph must have 2.." + std::to_string(kMaxVertices) +
                                    " vertices, got " + std::to_string(g_.vertex_count()));
    }
    if (!g_.is_connected()) {
        throw std::invalid_argument("query graph must be connected");
    }
}

namespace {

bool blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// Reads one graph block. Stops at EOF or at a blank line once the block has
// started (used by the query container). line_no is 1-based and advances.
LabeledGraph read_graph_block(std::istream& in, std::size_t& line_no, bool stop_at_blank) {
    std::string line;
    std::size_t n = 0, label_count = 0;
    bool have_header = false;
    std::vector<LabelId> labels;
    std::vector<char> labeled;
    std::vector<Edge> edges;
    std::unordered_map<std::uint64_t, VertexId> id_map;

    auto compact = [&](std::uint64_t raw, std::size_t at_line) {
        auto it = id_map.find(raw);
        if (it == id_map.end()) {
            throw ParseError("unknown vertex id " + std::to_string(raw), at_line);
        }
        return it->second;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) {
            if (have_header && stop_at_blank) break;
            continue;
        }
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> n >> label_count)) {
                throw ParseError("expected header '<|V|> <|L|>'", line_no);
            }
            labels.assign(n, 0);
            labeled.assign(n, 0);
            have_header = true;
            continue;
        }
        char tag;
        ls >> tag;
        if (tag == 'v') {
            std::uint64_t raw;
            LabelId label;
            if (!(ls >> raw >> label)) {
                throw ParseError("malformed vertex line", line_no);
            }
            if (id_map.size() >= n) {
                throw ParseError("more vertex lines than header |V|", line_no);
            }
            if (id_map.count(raw)) {
                throw ParseError("duplicate vertex id " + std::to_string(raw), line_no);
            }
            VertexId compacted = static_cast<VertexId>(id_map.size());
            id_map.emplace(raw, compacted);
            labels[compacted] = label;
            labeled[compacted] = 1;
        } else if (tag == 'e') {
            std::uint64_t a, b;
            if (!(ls >> a >> b)) {
                throw ParseError("malformed edge line", line_no);
            }
            VertexId u = compact(a, line_no), v = compact(b, line_no);
            if (u == v) {
                throw ParseError("self-loop at vertex " + std::to_string(a), line_no);
            }
            Edge e{std::min(u, v), std::max(u, v)};
            if (std::find(edges.begin(), edges.end(), e) != edges.end()) {
                throw ParseError("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")",
                                 line_no);
            }
            edges.push_back(e);
        } else {
            throw ParseError(std::string("unknown record tag '") + tag + "'", line_no);
        }
    }
    if (!have_header) {
        throw ParseError("empty graph input", line_no);
    }
    if (id_map.size() != n) {
        throw ParseError("header declared " + std::to_string(n) + " vertices, found " +
                             std::to_string(id_map.size()),
                         line_no);
    }
    return LabeledGraph::build(label_count, std::move(labels), edges);
}

} // namespace

LabeledGraph read_graph(std::istream& in) {
    std::size_t line_no = 0;
    return read_graph_block(in, line_no, /*stop_at_blank=*/false);
}

LabeledGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open graph file: " + path.string());
    }
    return read_graph(in);
}

void write_graph(std::ostream& out, const LabeledGraph& g) {
    out << g.vertex_count() << ' ' << g.label_count() << '\n';
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        out << "v " << v << ' ' << g.label(v) << '\n';
    }
    for (const auto& [u, v] : g.edges()) {
        out << "e " << u << ' ' << v << '\n';
    }
}

std::vector<QueryGraph> read_queries(std::istream& in) {
    std::vector<QueryGraph> out;
    std::size_t line_no = 0;
    while (true) {
        // peek for another block
        std::streampos pos = in.tellg();
        std::string line;
        bool found = false;
        std::size_t probe_line = line_no;
        while (std::getline(in, line)) {
            ++probe_line;
            if (!blank_or_comment(line)) {
                found = true;
                break;
            }
            pos = in.tellg();
            line_no = probe_line;
        }
        if (!found) break;
        in.clear();
        in.seekg(pos);
        out.emplace_back(read_graph_block(in, line_no, /*stop_at_blank=*/true));
    }
    return out;
}

std::vector<QueryGraph> load_queries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open query file: " + path.string());
    }
    return read_queries(in);
}

void write_queries(std::ostream& out, std::span<const QueryGraph> queries) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (i) out << '\n';
        write_graph(out, queries[i].graph());
    }
}

} // namespace pathmatch
