#ifndef PATHMATCH_ARTREE_HPP
#define PATHMATCH_ARTREE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/embedding.hpp"
#include "pathmatch/paths.hpp"

namespace pathmatch {

struct ARTreeEntry {
    PathId path_id = 0;
    EmbeddingVec embedding{0.0, 0.0};
    LabelKey key;

    bool operator==(const ARTreeEntry&) const = default;
};

struct MBR {
    EmbeddingVec lo{0.0, 0.0};
    EmbeddingVec hi{0.0, 0.0};

    bool operator==(const MBR&) const = default;
};

/// Compact routing-table summary of one shard index; stays well under 1 KB.
struct MBRSummary {
    std::uint64_t entry_count = 0;
    MBR mbr;
    // Entries bucketed by path length 1..5 (index length-1).
    std::array<std::uint64_t, 5> length_counts{};

    bool operator==(const MBRSummary&) const = default;
};

/// 2-d aggregate R-tree over path embeddings, bulk loaded with
/// sort-tile-recursive packing at fanout 16. A subtree is pruned exactly when
/// its MBR upper corner fails to dominate the query point, so every stored
/// entry dominating the query is reported.
class ARTree {
public:
    static constexpr std::uint32_t kFanout = 16;

    ARTree() = default;
    static ARTree build(std::vector<ARTreeEntry> entries);

    struct FilterResult {
        std::vector<PathId> ids;          // ascending path ids
        std::uint64_t nodes_visited = 0;  // tree nodes whose MBR was examined
    };

    // Entries with embedding >= query element-wise and an exactly equal label
    // key. An empty key skips the key test (pure dominance query).
    FilterResult filter(const EmbeddingVec& query, const LabelKey& key) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::span<const ARTreeEntry> entries() const { return entries_; }
    const MBR& root_mbr() const { return root_mbr_; }
    std::uint64_t node_count() const { return nodes_.size(); }

    MBRSummary summary() const;

    // Byte-stable, little-endian blob; identical trees serialize identically
    // and a deserialize/serialize round trip is byte-exact.
    std::vector<std::byte> serialize() const;
    static ARTree deserialize(std::span<const std::byte> blob);

    bool operator==(const ARTree& other) const { return entries_ == other.entries_; }

private:
    struct Node {
        MBR mbr;
        std::uint32_t first = 0;  // child node index, or entry index for leaves
        std::uint32_t count = 0;
        std::uint64_t agg_count = 0;  // entries beneath this node
        bool leaf = false;
    };

    std::vector<ARTreeEntry> entries_;  // canonical STR order
    std::vector<Node> nodes_;           // root last
    MBR root_mbr_;

    void pack_levels();
};

} // namespace pathmatch

#endif
