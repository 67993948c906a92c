#include "pathmatch/artree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathmatch/bytes.hpp"

namespace pathmatch {

namespace {

constexpr std::uint32_t kMagic = 0x52414d50U;  // "PMAR"
constexpr std::uint32_t kVersion = 1;

bool entry_order(const ARTreeEntry& a, const ARTreeEntry& b) {
    if (a.embedding[0] != b.embedding[0]) return a.embedding[0] < b.embedding[0];
    if (a.embedding[1] != b.embedding[1]) return a.embedding[1] < b.embedding[1];
    return a.path_id < b.path_id;
}

bool slice_order(const ARTreeEntry& a, const ARTreeEntry& b) {
    if (a.embedding[1] != b.embedding[1]) return a.embedding[1] < b.embedding[1];
    if (a.embedding[0] != b.embedding[0]) return a.embedding[0] < b.embedding[0];
    return a.path_id < b.path_id;
}

} // namespace

ARTree ARTree::build(std::vector<ARTreeEntry> entries) {
    ARTree t;
    if (entries.empty())
        return t;

    // Sort-tile-recursive: x-sort, cut into ceil(sqrt(#leaves)) vertical
    // slices, y-sort each slice, then pack runs of kFanout.
    std::sort(entries.begin(), entries.end(), entry_order);
    const std::size_t n = entries.size();
    const std::size_t leaves = (n + kFanout - 1) / kFanout;
    const std::size_t slices =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
    const std::size_t slice_size = (n + slices - 1) / slices;
    for (std::size_t s = 0; s * slice_size < n; ++s) {
        auto first = entries.begin() + static_cast<std::ptrdiff_t>(s * slice_size);
        auto last = entries.begin() +
                    static_cast<std::ptrdiff_t>(std::min(n, (s + 1) * slice_size));
        std::sort(first, last, slice_order);
    }

    t.entries_ = std::move(entries);
    t.pack_levels();
    return t;
}

void ARTree::pack_levels() {
    nodes_.clear();
    const std::size_t n = entries_.size();

    std::vector<std::uint32_t> level;  // node indices of the level being built
    for (std::size_t i = 0; i < n; i += kFanout) {
        Node leaf;
        leaf.leaf = true;
        leaf.first = static_cast<std::uint32_t>(i);
        leaf.count = static_cast<std::uint32_t>(std::min<std::size_t>(kFanout, n - i));
        leaf.agg_count = leaf.count;
        leaf.mbr.lo = leaf.mbr.hi = entries_[i].embedding;
        for (std::uint32_t j = 1; j < leaf.count; ++j) {
            const auto& e = entries_[i + j].embedding;
            leaf.mbr.lo[0] = std::min(leaf.mbr.lo[0], e[0]);
            leaf.mbr.lo[1] = std::min(leaf.mbr.lo[1], e[1]);
            leaf.mbr.hi[0] = std::max(leaf.mbr.hi[0], e[0]);
            leaf.mbr.hi[1] = std::max(leaf.mbr.hi[1], e[1]);
        }
        level.push_back(static_cast<std::uint32_t>(nodes_.size()));
        nodes_.push_back(leaf);
    }

    while (level.size() > 1) {
        std::vector<std::uint32_t> next;
        for (std::size_t i = 0; i < level.size(); i += kFanout) {
            Node inner;
            inner.leaf = false;
            inner.first = level[i];
            inner.count =
                static_cast<std::uint32_t>(std::min<std::size_t>(kFanout, level.size() - i));
            inner.mbr = nodes_[level[i]].mbr;
            for (std::uint32_t j = 0; j < inner.count; ++j) {
                const Node& c = nodes_[level[i + j]];
                inner.agg_count += c.agg_count;
                inner.mbr.lo[0] = std::min(inner.mbr.lo[0], c.mbr.lo[0]);
                inner.mbr.lo[1] = std::min(inner.mbr.lo[1], c.mbr.lo[1]);
                inner.mbr.hi[0] = std::max(inner.mbr.hi[0], c.mbr.hi[0]);
                inner.mbr.hi[1] = std::max(inner.mbr.hi[1], c.mbr.hi[1]);
            }
            next.push_back(static_cast<std::uint32_t>(nodes_.size()));
            nodes_.push_back(inner);
        }
        level = std::move(next);
    }

    root_mbr_ = nodes_.empty() ? MBR{} : nodes_.back().mbr;
}

ARTree::FilterResult ARTree::filter(const EmbeddingVec& query, const LabelKey& key) const {
    FilterResult out;
    if (nodes_.empty())
        return out;

    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(nodes_.size() - 1)};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        ++out.nodes_visited;
        if (!dominates(node.mbr.hi, query))
            continue;
        if (node.leaf) {
            for (std::uint32_t j = 0; j < node.count; ++j) {
                const ARTreeEntry& e = entries_[node.first + j];
                if (dominates(e.embedding, query) && (key.empty() || e.key == key))
                    out.ids.push_back(e.path_id);
            }
        } else {
            for (std::uint32_t j = 0; j < node.count; ++j)
                stack.push_back(node.first + j);
        }
    }
    std::sort(out.ids.begin(), out.ids.end());
    return out;
}

MBRSummary ARTree::summary() const {
    MBRSummary s;
    s.entry_count = entries_.size();
    s.mbr = root_mbr_;
    for (const auto& e : entries_) {
        const std::size_t len = e.key.empty() ? 1 : e.key.size() - 1;
        if (len >= 1 && len <= s.length_counts.size())
            ++s.length_counts[len - 1];
    }
    return s;
}

std::vector<std::byte> ARTree::serialize() const {
    ByteWriter w;
    w.u32(kMagic);
    w.u32(kVersion);
    w.u64(entries_.size());
    for (const auto& e : entries_) {
        w.u64(e.path_id);
        w.f64(e.embedding[0]);
        w.f64(e.embedding[1]);
        w.u32(static_cast<std::uint32_t>(e.key.size()));
        for (LabelId l : e.key)
            w.u32(l);
    }
    return w.take();
}

ARTree ARTree::deserialize(std::span<const std::byte> blob) {
    ByteReader r(blob);
    if (r.u32() != kMagic)
        throw std::invalid_argument("ARTree::deserialize: bad magic");
    if (r.u32() != kVersion)
        throw std::invalid_argument("ARTree::deserialize: unsupported version");
    const std::uint64_t n = r.u64();
    std::vector<ARTreeEntry> entries;
    entries.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        ARTreeEntry e;
        e.path_id = r.u64();
        e.embedding[0] = r.f64();
        e.embedding[1] = r.f64();
        const std::uint32_t klen = r.u32();
        e.key.reserve(klen);
        for (std::uint32_t j = 0; j < klen; ++j)
            e.key.push_back(r.u32());
        entries.push_back(std::move(e));
    }
    if (!r.done())
        throw std::invalid_argument("ARTree::deserialize: trailing bytes");
    return build(std::move(entries));
}

} // namespace pathmatch
