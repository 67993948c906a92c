#include "pathmatch/correlation.hpp"

#include <algorithm>

#include "pathmatch/errors.hpp"
#include "pathmatch/load_balance.hpp"

namespace pathmatch {

void CorrState::record_co_query(std::uint32_t i, std::uint32_t j, std::int64_t now_us) {
    if (i == j)
        return;
    ++counts_[idx(i, j)];
    ++counts_[idx(j, i)];
    events_.emplace_back(now_us, i, j);
    expire(now_us);
}

void CorrState::expire(std::int64_t now_us) {
    while (!events_.empty() && std::get<0>(events_.front()) + kCoQueryWindowMicros <= now_us) {
        const auto& [ts, i, j] = events_.front();
        --counts_[idx(i, j)];
        --counts_[idx(j, i)];
        events_.pop_front();
    }
}

std::uint64_t CorrState::max_n_co_query() const {
    std::uint64_t mx = 0;
    for (std::uint32_t i = 0; i < m_; ++i)
        for (std::uint32_t j = i + 1; j < m_; ++j)
            mx = std::max(mx, counts_[idx(i, j)]);
    return mx;
}

void CorrState::set_migrating(std::uint32_t shard, bool on) {
    auto it = std::find(migrating_.begin(), migrating_.end(), shard);
    if (on && it == migrating_.end())
        migrating_.push_back(shard);
    else if (!on && it != migrating_.end())
        migrating_.erase(it);
}

bool CorrState::is_migrating(std::uint32_t shard) const {
    return std::find(migrating_.begin(), migrating_.end(), shard) != migrating_.end();
}

double dynamic_corr(std::uint32_t i, std::uint32_t j, const StaticCorrelation& stat,
                    const CorrState& state) {
    if (i == j)
        throw ConfigError("dynamic_corr: i and j must differ");
    if (state.is_migrating(j))
        return 0.0;

    const double alpha = alpha_decay(state.runtime_seconds);
    const double max_co = static_cast<double>(state.max_n_co_query());
    const double eta = static_cast<double>(stat.max_n_cross) / (max_co + kCorrEps);

    const double a = alpha * static_cast<double>(stat.n_cross(i, j));
    const double b = (1.0 - alpha) * static_cast<double>(state.n_co_query(i, j)) * eta;
    const double c = alpha * static_cast<double>(stat.n_cross_total);
    const double d = (1.0 - alpha) * max_co;

    return stat.w_label(i, j) * (a + b) / (c + d + 1.0);
}

} // namespace pathmatch
