#include "pathmatch/cache.hpp"

#include <algorithm>
#include <cmath>

namespace pathmatch {

double decay_feature(double f0, double t_seconds, double tau) {
    return std::min(std::max(f0 * std::exp(-t_seconds / tau), 0.0), 1.0);
}

double trigger_threshold(double hit_rate, double latency_ms) {
    if (hit_rate < 0.6 || latency_ms > 20.0)
        return 0.80;
    if (hit_rate >= 0.8 && latency_ms <= 10.0)
        return 0.95;
    return 0.90;
}

double degree_threshold(const LabeledGraph& g) {
    if (g.vertex_count() == 0)
        return 10.0;
    std::vector<std::uint32_t> degs(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        degs[v] = g.degree(v);
    std::sort(degs.begin(), degs.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(degs.size())));
    const double q95 = degs[std::max<std::size_t>(rank, 1) - 1];
    return std::max(q95 / 2.0, 10.0);
}

double cache_value(const FeatureVec& f, const Weights& w, double mean_degree) {
    return w[0] * f[0] + w[1] * f[1] + w[2] * f[2] * mean_degree + w[3] * f[3];
}

SyncSettings window_and_sync(double queries_per_sec, std::uint32_t recent_query_count) {
    SyncSettings s;
    if (queries_per_sec >= 20.0)
        s.window_s = 30.0;
    else if (queries_per_sec > 5.0)
        s.window_s = 60.0;
    else
        s.window_s = 120.0;

    if (recent_query_count >= 50)
        s.weight_sync_s = 30.0;
    else if (recent_query_count > 20)
        s.weight_sync_s = 60.0;
    else
        s.weight_sync_s = 120.0;
    s.quota_sync_s = 2.0 * s.weight_sync_s;
    return s;
}

FeatureVec feature_snapshot(const FeatureInputs& in, const FeatureWindowStats& stats) {
    FeatureVec f{};
    f[0] = stats.max_freq > 0.0 ? in.freq / stats.max_freq : 0.0;
    f[1] = stats.max_co_count > 0.0 ? in.co_count / stats.max_co_count : 0.0;
    f[2] = std::clamp(1.0 - in.idle_s / stats.window_duration_s, 0.0, 1.0);
    f[3] = in.total_freq > 0
               ? static_cast<double>(in.match_freq) / static_cast<double>(in.total_freq)
               : 0.0;
    return f;
}

std::vector<PathId> select_evictions(std::span<const EvictionInput> entries,
                                     std::size_t c_max, double t_up, double theta_d,
                                     std::span<const PathId> top50_sorted) {
    std::vector<PathId> out;
    if (c_max == 0 || entries.empty())
        return out;
    const double util = static_cast<double>(entries.size()) / static_cast<double>(c_max);
    if (util <= t_up)
        return out;

    double max_v = entries[0].value;
    for (const auto& e : entries)
        max_v = std::max(max_v, e.value);

    auto in_top50 = [&](PathId id) {
        return std::binary_search(top50_sorted.begin(), top50_sorted.end(), id);
    };

    std::vector<EvictionInput> normals;
    for (const auto& e : entries) {
        const bool protect = e.value >= 0.5 * max_v &&
                             (in_top50(e.id) || e.mean_degree >= theta_d);
        if (protect)
            continue;
        if (e.value < 0.2 * max_v)
            out.push_back(e.id);
        else
            normals.push_back(e);
    }
    std::sort(out.begin(), out.end());

    std::sort(normals.begin(), normals.end(), [](const auto& a, const auto& b) {
        return a.value != b.value ? a.value < b.value : a.id < b.id;
    });
    const double t_low = low_threshold(t_up);
    std::size_t remaining = entries.size() - out.size();
    for (const auto& e : normals) {
        if (static_cast<double>(remaining) / static_cast<double>(c_max) <= t_low)
            break;
        out.push_back(e.id);
        --remaining;
    }
    return out;
}

CacheEntry* CacheTier::find(PathId id) {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

bool CacheTier::touch(PathId id, std::int64_t now_us) {
    auto it = entries_.find(id);
    if (it == entries_.end()) {
        ++stats_.misses;
        return false;
    }
    it->second.last_access_us = now_us;
    lru_tick_[id] = ++tick_;
    ++stats_.hits;
    return true;
}

double CacheTier::admission_threshold() const {
    if (policy_ == CachePolicy::Lru || entries_.size() < capacity_)
        return 0.0;
    double mn = 0.0;
    bool first = true;
    for (const auto& [id, e] : entries_) {
        if (first || e.value < mn) {
            mn = e.value;
            first = false;
        }
    }
    return first ? 0.0 : mn;
}

std::vector<PathId> CacheTier::evict_for_space(double t_up, double theta_d,
                                               std::span<const PathId> top50_sorted) {
    std::vector<PathId> gone;
    if (policy_ == CachePolicy::Lru) {
        while (entries_.size() >= capacity_ && !entries_.empty()) {
            auto victim = std::min_element(
                lru_tick_.begin(), lru_tick_.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });
            gone.push_back(victim->first);
            entries_.erase(victim->first);
            lru_tick_.erase(victim);
            ++stats_.evicted_lru;
        }
        return gone;
    }

    std::vector<EvictionInput> inputs;
    inputs.reserve(entries_.size());
    for (const auto& [id, e] : entries_)
        inputs.push_back({id, e.value, e.mean_degree});
    // Force the over-threshold branch: a full tier must shed something to
    // admit, independent of t_up.
    std::vector<PathId> victims =
        select_evictions(inputs, capacity_, 0.0, theta_d, top50_sorted);
    if (victims.empty())
        return gone;
    // Shed only as many as needed to make room, lowest value first.
    const double max_v = value_ceiling();
    std::sort(victims.begin(), victims.end(), [&](PathId a, PathId b) {
        const double va = entries_.at(a).value, vb = entries_.at(b).value;
        return va != vb ? va < vb : a < b;
    });
    for (PathId id : victims) {
        if (entries_.size() < capacity_)
            break;
        if (entries_.at(id).value < 0.2 * max_v)
            ++stats_.evicted_evictable;
        else
            ++stats_.evicted_normal;
        entries_.erase(id);
        lru_tick_.erase(id);
        gone.push_back(id);
    }
    return gone;
}

double CacheTier::value_ceiling() const {
    double mx = 0.0;
    for (const auto& [id, e] : entries_)
        mx = std::max(mx, e.value);
    return mx;
}

bool CacheTier::insert(const CacheEntry& e, double t_up, double theta_d,
                       std::span<const PathId> top50_sorted) {
    if (capacity_ == 0)
        return false;
    auto it = entries_.find(e.id);
    if (it != entries_.end()) {
        it->second = e;
        lru_tick_[e.id] = ++tick_;
        return true;
    }
    if (policy_ == CachePolicy::Adaptive && entries_.size() >= capacity_ &&
        e.value < admission_threshold()) {
        ++stats_.rejected_inserts;
        return false;
    }
    if (entries_.size() >= capacity_) {
        evict_for_space(t_up, theta_d, top50_sorted);
        if (entries_.size() >= capacity_) {
            ++stats_.rejected_inserts;
            return false;  // everything resident is protected
        }
    }
    entries_[e.id] = e;
    lru_tick_[e.id] = ++tick_;
    return true;
}

void CacheTier::set_value(PathId id, double v) {
    auto it = entries_.find(id);
    if (it != entries_.end())
        it->second.value = v;
}

std::vector<PathId> CacheTier::run_eviction(double t_up, double theta_d,
                                            std::span<const PathId> top50_sorted) {
    if (policy_ == CachePolicy::Lru || capacity_ == 0)
        return {};
    std::vector<EvictionInput> inputs;
    inputs.reserve(entries_.size());
    double max_v = 0.0;
    for (const auto& [id, e] : entries_) {
        inputs.push_back({id, e.value, e.mean_degree});
        max_v = std::max(max_v, e.value);
    }
    std::vector<PathId> gone = select_evictions(inputs, capacity_, t_up, theta_d,
                                                top50_sorted);
    for (PathId id : gone) {
        if (entries_.at(id).value < 0.2 * max_v)
            ++stats_.evicted_evictable;
        else
            ++stats_.evicted_normal;
        entries_.erase(id);
        lru_tick_.erase(id);
    }
    return gone;
}

std::vector<PathId> CacheTier::resident_ids() const {
    std::vector<PathId> ids;
    ids.reserve(entries_.size());
    for (const auto& [id, e] : entries_)
        ids.push_back(id);
    return ids;
}

void AccessWindow::record_query(std::span<const PathId> accessed) {
    if (seq_ % kSnapshotEpochQueries == 0)
        refresh_top100();
    ++seq_;

    QueryRecord rec;
    rec.paths.assign(accessed.begin(), accessed.end());
    std::sort(rec.paths.begin(), rec.paths.end());
    rec.paths.erase(std::unique(rec.paths.begin(), rec.paths.end()), rec.paths.end());

    std::uint64_t top_present = 0;
    for (PathId p : rec.paths)
        if (std::binary_search(top100_.begin(), top100_.end(), p))
            ++top_present;
    for (PathId p : rec.paths) {
        ++freq_[p];
        const bool self_top = std::binary_search(top100_.begin(), top100_.end(), p);
        const std::uint64_t delta = top_present - (self_top ? 1 : 0);
        if (delta > 0) {
            co_[p] += delta;
            rec.co_deltas.emplace_back(p, delta);
        }
    }
    window_.push_back(std::move(rec));

    while (window_.size() > kFreqWindowQueries) {
        const QueryRecord& old = window_.front();
        for (PathId p : old.paths) {
            auto it = freq_.find(p);
            if (it != freq_.end() && --it->second == 0)
                freq_.erase(it);
        }
        for (const auto& [p, d] : old.co_deltas) {
            auto it = co_.find(p);
            if (it != co_.end()) {
                it->second -= std::min(it->second, d);
                if (it->second == 0)
                    co_.erase(it);
            }
        }
        window_.pop_front();
    }
}

double AccessWindow::freq(PathId id) const {
    auto it = freq_.find(id);
    return it == freq_.end() ? 0.0 : static_cast<double>(it->second);
}

double AccessWindow::max_freq() const {
    std::uint64_t mx = 0;
    for (const auto& [id, c] : freq_)
        mx = std::max(mx, c);
    return static_cast<double>(mx);
}

double AccessWindow::co_count(PathId id) const {
    auto it = co_.find(id);
    return it == co_.end() ? 0.0 : static_cast<double>(it->second);
}

double AccessWindow::max_co_count() const {
    std::uint64_t mx = 0;
    for (const auto& [id, c] : co_)
        mx = std::max(mx, c);
    return static_cast<double>(mx);
}

std::vector<PathId> AccessWindow::top_n(std::size_t n) const {
    std::vector<std::pair<PathId, std::uint64_t>> ranked(freq_.begin(), freq_.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<PathId> out;
    out.reserve(std::min(n, ranked.size()));
    for (std::size_t i = 0; i < ranked.size() && i < n; ++i)
        out.push_back(ranked[i].first);
    std::sort(out.begin(), out.end());
    return out;
}

void AccessWindow::refresh_top100() { top100_ = top_n(100); }

} // namespace pathmatch
