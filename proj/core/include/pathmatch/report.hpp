#ifndef PATHMATCH_REPORT_HPP
#define PATHMATCH_REPORT_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathmatch/metrics.hpp"

namespace pathmatch {

/// Aggregates of one run's metrics stream, keyed by the run label
/// (typically the toggle combination).
struct RunSummary {
    std::string label;
    std::uint64_t queries = 0;
    double latency_mean_ms = 0.0;
    double latency_p50_ms = 0.0;
    double latency_p95_ms = 0.0;
    std::uint64_t candidates_total = 0;  // intermediate candidates across stages
    std::uint64_t results_total = 0;
    double hit_rate_master = 0.0;
    double hit_rate_slave = 0.0;
    double hit_rate_overall = 0.0;
    std::uint64_t migrations = 0;
    std::uint64_t retransmits = 0;
    double sigma_first = 0.0;
    double sigma_last = 0.0;
    double sigma_max = 0.0;
    std::vector<std::pair<double, double>> sigma_timeline;  // (t_ms, sigma)
};

RunSummary summarize_run(const std::string& label, const MetricsLog& log);

/// Plain-text comparison tables over several runs: latency distribution,
/// sigma timeline, cache hit rates by tier, and candidate totals.
/// Empty input (or runs with zero queries and zero epochs) yields "no data".
std::string render_report(std::span<const RunSummary> runs);

/// The same aggregates as a machine-readable JSON document.
std::string report_json(std::span<const RunSummary> runs);

std::string emit_report(std::span<const std::pair<std::string, MetricsLog>> runs);

} // namespace pathmatch

#endif
