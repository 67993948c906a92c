#include "pathmatch/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace pathmatch {

namespace {

double percentile_nearest_rank(std::vector<double> v, double q) {
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(rank, 1) - 1];
}

} // namespace

RunSummary summarize_run(const std::string& label, const MetricsLog& log) {
    RunSummary s;
    s.label = label;

    std::vector<double> latencies;
    std::uint64_t hits_master = 0, hits_slave = 0, lookups = 0;
    for (const MetricsRecord* q : log.of_kind("query")) {
        ++s.queries;
        latencies.push_back(q->number("latency_ms"));
        s.candidates_total += static_cast<std::uint64_t>(q->number("candidates"));
        s.results_total += static_cast<std::uint64_t>(q->number("results"));
        hits_master += static_cast<std::uint64_t>(q->number("hit_master"));
        hits_slave += static_cast<std::uint64_t>(q->number("hit_slave"));
        lookups += static_cast<std::uint64_t>(q->number("lookups"));
    }
    if (!latencies.empty()) {
        double sum = 0.0;
        for (double x : latencies)
            sum += x;
        s.latency_mean_ms = sum / static_cast<double>(latencies.size());
        s.latency_p50_ms = percentile_nearest_rank(latencies, 0.50);
        s.latency_p95_ms = percentile_nearest_rank(latencies, 0.95);
    }
    if (lookups > 0) {
        s.hit_rate_master = static_cast<double>(hits_master) / static_cast<double>(lookups);
        s.hit_rate_slave = static_cast<double>(hits_slave) / static_cast<double>(lookups);
        s.hit_rate_overall =
            static_cast<double>(hits_master + hits_slave) / static_cast<double>(lookups);
    }

    for (const MetricsRecord* e : log.of_kind("epoch")) {
        const double t = e->number("t_ms");
        const double sigma = e->number("sigma");
        s.sigma_timeline.emplace_back(t, sigma);
        // epoch records carry cumulative counters; the run total is the max
        s.migrations = std::max(s.migrations, static_cast<std::uint64_t>(e->number("migrations")));
        s.retransmits =
            std::max(s.retransmits, static_cast<std::uint64_t>(e->number("retransmits")));
    }
    if (!s.sigma_timeline.empty()) {
        s.sigma_first = s.sigma_timeline.front().second;
        s.sigma_last = s.sigma_timeline.back().second;
        for (const auto& [t, sig] : s.sigma_timeline)
            s.sigma_max = std::max(s.sigma_max, sig);
    }
    return s;
}

std::string render_report(std::span<const RunSummary> runs) {
    bool any = false;
    for (const RunSummary& r : runs)
        any = any || r.queries > 0 || !r.sigma_timeline.empty();
    if (!any)
        return "no data\n";

    std::ostringstream out;
    auto row = [&](std::initializer_list<std::string> cells) {
        bool first = true;
        for (const std::string& c : cells) {
            if (!first)
                out << "  ";
            first = false;
            out << c;
            if (c.size() < 14)
                out << std::string(14 - c.size(), ' ');
        }
        out << "\n";
    };
    auto num = [](double v) { return format_double(v); };

    out << "## latency (ms)\n";
    row({"run", "queries", "mean", "p50", "p95"});
    for (const RunSummary& r : runs)
        row({r.label, std::to_string(r.queries), num(r.latency_mean_ms),
             num(r.latency_p50_ms), num(r.latency_p95_ms)});

    out << "\n## cache hit rates\n";
    row({"run", "master", "slave", "overall"});
    for (const RunSummary& r : runs)
        row({r.label, num(r.hit_rate_master), num(r.hit_rate_slave),
             num(r.hit_rate_overall)});

    out << "\n## candidates and results\n";
    row({"run", "candidates", "results"});
    for (const RunSummary& r : runs)
        row({r.label, std::to_string(r.candidates_total), std::to_string(r.results_total)});

    out << "\n## load sigma timeline\n";
    row({"run", "first", "max", "last", "migrations", "retransmits"});
    for (const RunSummary& r : runs)
        row({r.label, num(r.sigma_first), num(r.sigma_max), num(r.sigma_last),
             std::to_string(r.migrations), std::to_string(r.retransmits)});
    for (const RunSummary& r : runs) {
        if (r.sigma_timeline.empty())
            continue;
        out << "\n" << r.label << ":";
        for (const auto& [t, sig] : r.sigma_timeline)
            out << " " << num(t) << "/" << num(sig);
        out << "\n";
    }
    return out.str();
}

std::string report_json(std::span<const RunSummary> runs) {
    nlohmann::json j = nlohmann::json::array();
    for (const RunSummary& r : runs) {
        nlohmann::json timeline = nlohmann::json::array();
        for (const auto& [t, sig] : r.sigma_timeline)
            timeline.push_back({{"t_ms", t}, {"sigma", sig}});
        j.push_back({{"label", r.label},
                     {"queries", r.queries},
                     {"latency_mean_ms", r.latency_mean_ms},
                     {"latency_p50_ms", r.latency_p50_ms},
                     {"latency_p95_ms", r.latency_p95_ms},
                     {"candidates_total", r.candidates_total},
                     {"results_total", r.results_total},
                     {"hit_rate_master", r.hit_rate_master},
                     {"hit_rate_slave", r.hit_rate_slave},
                     {"hit_rate_overall", r.hit_rate_overall},
                     {"migrations", r.migrations},
                     {"retransmits", r.retransmits},
                     {"sigma_timeline", std::move(timeline)}});
    }
    return j.dump(2) + "\n";
}

std::string emit_report(std::span<const std::pair<std::string, MetricsLog>> runs) {
    std::vector<RunSummary> summaries;
    summaries.reserve(runs.size());
    for (const auto& [label, log] : runs)
        summaries.push_back(summarize_run(label, log));
    return render_report(summaries);
}

} // namespace pathmatch
