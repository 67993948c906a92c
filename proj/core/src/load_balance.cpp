#include "pathmatch/load_balance.hpp"

#include <algorithm>
#include <cmath>

#include "pathmatch/errors.hpp"

namespace pathmatch {

double machine_load(std::span<const LoadSample> samples, double comm_max) {
    double cpu = 0.0, comm = 0.0, mem = 0.0;
    for (const auto& s : samples) {
        cpu += s.u_cpu;
        if (comm_max > 0.0)
            comm += s.comm_count / comm_max;
        mem += s.mem_ratio;
    }
    return kLoadWeightCpu * cpu + kLoadWeightComm * comm + kLoadWeightMem * mem;
}

ClusterLoadView cluster_stats(std::span<const double> machine_loads, double comm_max) {
    if (machine_loads.empty())
        throw ConfigError("cluster_stats: need at least one machine");
    ClusterLoadView v;
    v.machine_load.assign(machine_loads.begin(), machine_loads.end());
    v.comm_max = comm_max;
    for (double l : machine_loads)
        v.mean += l;
    v.mean /= static_cast<double>(machine_loads.size());
    double var = 0.0;
    for (double l : machine_loads)
        var += (l - v.mean) * (l - v.mean);
    v.sigma = std::sqrt(var / static_cast<double>(machine_loads.size()));
    v.triggered = v.sigma >= kSigmaTrigger;
    return v;
}

double alpha_decay(double t_seconds) {
    return std::max(0.7 - 0.7 * t_seconds / 60.0, 0.0);
}

MigrationCount migration_count(double delta_l, std::span<const double> shard_loads) {
    if (delta_l <= 0.0 || shard_loads.empty())
        throw ConfigError("migration_count: need delta_l > 0 and >= 1 shard");

    double mean = 0.0;
    for (double l : shard_loads)
        mean += l;
    mean /= static_cast<double>(shard_loads.size());
    double var = 0.0;
    for (double l : shard_loads)
        var += (l - mean) * (l - mean);
    const double sigma = std::sqrt(var / static_cast<double>(shard_loads.size()));

    const double q = sigma < 0.1 ? 0.75 : (sigma <= 0.3 ? 0.90 : 0.95);

    std::vector<double> sorted(shard_loads.begin(), shard_loads.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    MigrationCount out;
    out.u_quantile = sorted[std::max<std::size_t>(rank, 1) - 1];

    if (out.u_quantile <= 0.0) {
        out.m = static_cast<std::uint32_t>(shard_loads.size());
        return out;
    }
    out.m = static_cast<std::uint32_t>(
        std::max(std::ceil(delta_l / out.u_quantile), 1.0));
    return out;
}

double candidate_priority(double cross_query_ratio, double corr_local, double size_units,
                          double prune_rate) {
    const double f = cross_query_ratio;
    const double w_load = 0.5 + 0.5 * f;
    const double p_corr = std::pow(1.0 - corr_local, 1.0 - f);
    const double p_size = 1.0 / (size_units + kPriorityEps);
    const double p_prune = 0.8 + 0.2 * prune_rate;
    return w_load * p_corr * p_size * p_prune;
}

std::optional<std::uint32_t> select_target(const TargetQuery& q) {
    std::optional<std::uint32_t> best;
    double best_score = 0.0;
    for (std::size_t k = 0; k < q.machine_loads.size(); ++k) {
        const double load = q.machine_loads[k];
        if (load > q.mean - 0.8 * q.sigma)
            continue;
        if (load / kCapacityLimit + kReservedFraction >= 1.0)
            continue;
        const double score = q.mean_corr[k] *
                             (1.0 - kReservedFraction - load / kCapacityLimit) *
                             q.mean_w_label[k];
        if (!best || score > best_score) {
            best = static_cast<std::uint32_t>(k);
            best_score = score;
        }
    }
    return best;
}

} // namespace pathmatch
