#ifndef PATHMATCH_CORRELATION_HPP
#define PATHMATCH_CORRELATION_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "pathmatch/partition.hpp"

namespace pathmatch {

inline constexpr double kCorrEps = 1e-6;
inline constexpr double kCorrThreshold = 0.2;  // pairs at or above count as related
inline constexpr std::int64_t kCoQueryWindowMicros = 10'000'000;  // T_update

/// Runtime correlation state: a sliding 10 s window of shard co-query counts
/// plus the set of shards currently being migrated (which must never attract
/// more data onto a moving target).
class CorrState {
public:
    CorrState() = default;
    explicit CorrState(std::uint32_t shard_count)
        : m_(shard_count),
          counts_(static_cast<std::size_t>(shard_count) * shard_count, 0) {}

    std::uint32_t shard_count() const { return m_; }

    void record_co_query(std::uint32_t i, std::uint32_t j, std::int64_t now_us);
    void expire(std::int64_t now_us);

    std::uint64_t n_co_query(std::uint32_t i, std::uint32_t j) const {
        return counts_[idx(i, j)];
    }
    std::uint64_t max_n_co_query() const;

    void set_migrating(std::uint32_t shard, bool on);
    bool is_migrating(std::uint32_t shard) const;

    double runtime_seconds = 0.0;

private:
    std::size_t idx(std::uint32_t i, std::uint32_t j) const {
        return static_cast<std::size_t>(i) * m_ + j;
    }

    std::uint32_t m_ = 0;
    std::vector<std::uint64_t> counts_;
    std::deque<std::tuple<std::int64_t, std::uint32_t, std::uint32_t>> events_;
    std::vector<std::uint32_t> migrating_;
};

/// Blend of offline path statistics and the live co-query window, weighted by
/// label similarity and normalized so fresh deployments lean on offline data
/// while warmed-up ones lean on the window.
double dynamic_corr(std::uint32_t i, std::uint32_t j, const StaticCorrelation& stat,
                    const CorrState& state);

} // namespace pathmatch

#endif
