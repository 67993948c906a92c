#include "pathmatch/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "pathmatch/errors.hpp"
#include "pathmatch/paths.hpp"
#include "pathmatch/rng.hpp"

namespace pathmatch {

namespace {

struct CGraph {
    std::vector<std::uint64_t> vw;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adj;
    std::uint64_t total = 0;

    std::uint32_t size() const { return static_cast<std::uint32_t>(vw.size()); }
};

CGraph from_graph(const LabeledGraph& g) {
    CGraph cg;
    cg.vw.assign(g.vertex_count(), 1);
    cg.total = g.vertex_count();
    cg.adj.resize(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (VertexId u : g.neighbors(v))
            cg.adj[v].emplace_back(u, 1);
    return cg;
}

// Heavy-edge matching; writes the old->coarse id map and returns the coarse
// vertex count. Coarse ids are assigned in ascending representative order so
// the result does not depend on the visiting permutation.
std::uint32_t heavy_edge_matching(const CGraph& cg, Rng& rng, std::vector<std::uint32_t>& cid) {
    const std::uint32_t n = cg.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::uint32_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_u32_below(i)]);

    std::vector<std::uint32_t> mate(n);
    std::iota(mate.begin(), mate.end(), 0);
    for (std::uint32_t u : order) {
        if (mate[u] != u)
            continue;
        std::uint32_t best = u;
        std::uint64_t best_w = 0;
        for (const auto& [v, w] : cg.adj[u]) {
            if (mate[v] != v || v == u)
                continue;
            if (w > best_w || (w == best_w && best != u && v < best)) {
                best = v;
                best_w = w;
            }
        }
        if (best != u) {
            mate[u] = best;
            mate[best] = u;
        }
    }

    cid.assign(n, 0);
    std::uint32_t next = 0;
    for (std::uint32_t u = 0; u < n; ++u)
        if (u <= mate[u])
            cid[u] = next++;
    for (std::uint32_t u = 0; u < n; ++u)
        if (u > mate[u])
            cid[u] = cid[mate[u]];
    return next;
}

CGraph contract(const CGraph& cg, const std::vector<std::uint32_t>& cid, std::uint32_t coarse_n) {
    CGraph out;
    out.vw.assign(coarse_n, 0);
    out.total = cg.total;
    out.adj.resize(coarse_n);
    for (std::uint32_t u = 0; u < cg.size(); ++u)
        out.vw[cid[u]] += cg.vw[u];

    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> triples;
    for (std::uint32_t u = 0; u < cg.size(); ++u)
        for (const auto& [v, w] : cg.adj[u])
            if (cid[u] != cid[v])
                triples.emplace_back(cid[u], cid[v], w);
    std::sort(triples.begin(), triples.end());
    for (std::size_t i = 0; i < triples.size();) {
        std::size_t j = i;
        std::uint64_t w = 0;
        while (j < triples.size() && std::get<0>(triples[j]) == std::get<0>(triples[i]) &&
               std::get<1>(triples[j]) == std::get<1>(triples[i]))
            w += std::get<2>(triples[j++]);
        out.adj[std::get<0>(triples[i])].emplace_back(std::get<1>(triples[i]), w);
        i = j;
    }
    return out;
}

double spread_of(const std::vector<std::uint64_t>& pw, std::uint64_t total) {
    const auto [mn, mx] = std::minmax_element(pw.begin(), pw.end());
    return static_cast<double>(*mx - *mn) * static_cast<double>(pw.size()) /
           static_cast<double>(total);
}

std::vector<std::uint32_t> initial_partition(const CGraph& cg, std::uint32_t m) {
    const std::uint32_t n = cg.size();
    constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> part(n, kUnassigned);
    std::vector<std::uint64_t> pw(m, 0);
    std::vector<std::uint64_t> conn(n);
    std::uint64_t remaining = cg.total;
    std::uint32_t unassigned = n;

    for (std::uint32_t k = 0; k + 1 < m && unassigned > 0; ++k) {
        const double target = static_cast<double>(remaining) / static_cast<double>(m - k);

        std::uint32_t seed = kUnassigned;
        std::uint64_t best_deg = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (part[v] != kUnassigned)
                continue;
            std::uint64_t d = 0;
            for (const auto& [u, w] : cg.adj[v])
                d += w;
            if (seed == kUnassigned || d > best_deg) {
                seed = v;
                best_deg = d;
            }
        }

        std::fill(conn.begin(), conn.end(), 0);
        auto add = [&](std::uint32_t v) {
            part[v] = k;
            pw[k] += cg.vw[v];
            remaining -= cg.vw[v];
            --unassigned;
            for (const auto& [u, w] : cg.adj[v])
                if (part[u] == kUnassigned)
                    conn[u] += w;
        };
        add(seed);

        while (static_cast<double>(pw[k]) < target && unassigned > 0) {
            std::uint32_t pick = kUnassigned;
            std::uint64_t best = 0;
            for (std::uint32_t v = 0; v < n; ++v)
                if (part[v] == kUnassigned && conn[v] > 0 &&
                    (pick == kUnassigned || conn[v] > best)) {
                    pick = v;
                    best = conn[v];
                }
            if (pick == kUnassigned)
                break;  // frontier exhausted; later parts absorb the rest
            add(pick);
        }
    }

    for (std::uint32_t v = 0; v < n; ++v)
        if (part[v] == kUnassigned)
            part[v] = m - 1;
    return part;
}

// Greedy gain moves over all vertices; a move is allowed when it does not
// push the spread beyond max(max_spread, spread before the move).
void refine(const CGraph& cg, std::uint32_t m, double max_spread,
            std::vector<std::uint32_t>& part) {
    const std::uint32_t n = cg.size();
    std::vector<std::uint64_t> pw(m, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        pw[part[v]] += cg.vw[v];

    std::vector<std::uint64_t> conn(m);
    for (int pass = 0; pass < 8; ++pass) {
        bool moved = false;
        for (std::uint32_t v = 0; v < n; ++v) {
            std::fill(conn.begin(), conn.end(), 0);
            for (const auto& [u, w] : cg.adj[v])
                conn[part[u]] += w;
            const std::uint32_t cur = part[v];
            std::uint32_t best = cur;
            for (std::uint32_t p = 0; p < m; ++p)
                if (p != cur && conn[p] > conn[best])
                    best = p;
            if (best == cur)
                continue;

            const double before = spread_of(pw, cg.total);
            pw[cur] -= cg.vw[v];
            pw[best] += cg.vw[v];
            const double after = spread_of(pw, cg.total);
            if (after <= std::max(max_spread, before) + 1e-12) {
                part[v] = best;
                moved = true;
            } else {
                pw[cur] += cg.vw[v];
                pw[best] -= cg.vw[v];
            }
        }
        if (!moved)
            break;
    }
}

// Unit-weight balancing at the finest level: shift the cheapest-cut vertex
// from the heaviest part to the lightest until the spread bound holds.
void force_balance(const CGraph& cg, std::uint32_t m, double max_spread,
                   std::vector<std::uint32_t>& part) {
    const std::uint32_t n = cg.size();
    std::vector<std::uint64_t> pw(m, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        pw[part[v]] += cg.vw[v];

    while (spread_of(pw, cg.total) > max_spread) {
        const std::uint32_t from = static_cast<std::uint32_t>(
            std::max_element(pw.begin(), pw.end()) - pw.begin());
        const std::uint32_t to = static_cast<std::uint32_t>(
            std::min_element(pw.begin(), pw.end()) - pw.begin());
        if (pw[from] <= pw[to] + 1)
            break;  // cannot improve further with unit weights

        std::uint32_t pick = std::numeric_limits<std::uint32_t>::max();
        std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
        for (std::uint32_t v = 0; v < n; ++v) {
            if (part[v] != from)
                continue;
            std::int64_t gain = 0;
            for (const auto& [u, w] : cg.adj[v]) {
                if (part[u] == to)
                    gain += static_cast<std::int64_t>(w);
                else if (part[u] == from)
                    gain -= static_cast<std::int64_t>(w);
            }
            if (gain > best_gain) {
                best_gain = gain;
                pick = v;
            }
        }
        if (pick == std::numeric_limits<std::uint32_t>::max())
            break;
        part[pick] = to;
        pw[from] -= cg.vw[pick];
        pw[to] += cg.vw[pick];
    }
}

} // namespace

std::vector<std::uint32_t> partition_assignment(const LabeledGraph& g, std::uint32_t m,
                                                double max_spread, std::uint64_t seed) {
    const std::uint32_t n = g.vertex_count();
    if (m == 0 || m > n)
        throw ConfigError("partition_assignment: need 1 <= m <= |V|");

    const double achievable = (n % m == 0) ? 0.0 : static_cast<double>(m) / n;
    if (achievable > max_spread)
        throw ConstraintError("partition_assignment: spread bound unreachable for this m",
                              achievable);

    if (m == 1)
        return std::vector<std::uint32_t>(n, 0);

    Rng rng(derive_seed(seed, "partition"));
    std::vector<CGraph> levels{from_graph(g)};
    std::vector<std::vector<std::uint32_t>> maps;
    const std::uint32_t coarse_target = std::max(4 * m, 64u);
    while (levels.back().size() > coarse_target) {
        std::vector<std::uint32_t> cid;
        const std::uint32_t cn = heavy_edge_matching(levels.back(), rng, cid);
        if (cn >= levels.back().size() * 98 / 100)
            break;
        levels.push_back(contract(levels.back(), cid, cn));
        maps.push_back(std::move(cid));
    }

    std::vector<std::uint32_t> part = initial_partition(levels.back(), m);
    refine(levels.back(), m, max_spread, part);

    for (std::size_t lvl = maps.size(); lvl-- > 0;) {
        std::vector<std::uint32_t> finer(levels[lvl].size());
        for (std::uint32_t v = 0; v < levels[lvl].size(); ++v)
            finer[v] = part[maps[lvl][v]];
        part = std::move(finer);
        refine(levels[lvl], m, max_spread, part);
    }

    force_balance(levels.front(), m, max_spread, part);
    refine(levels.front(), m, max_spread, part);
    force_balance(levels.front(), m, max_spread, part);

    std::vector<std::uint64_t> pw(m, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        pw[part[v]] += 1;
    const double final_spread = spread_of(pw, n);
    if (final_spread > max_spread)
        throw ConstraintError("partition_assignment: balancing failed", final_spread);
    return part;
}

std::vector<Shard> make_shards(const LabeledGraph& g,
                               std::span<const std::uint32_t> assignment, std::uint32_t m) {
    std::vector<Shard> shards(m);
    for (std::uint32_t k = 0; k < m; ++k)
        shards[k].id = k;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        shards[assignment[v]].vertices.push_back(v);

    for (const Edge& e : g.edges()) {
        const std::uint32_t a = assignment[e.first];
        const std::uint32_t b = assignment[e.second];
        if (a == b)
            shards[a].internal_edges.push_back(e);
    }

    std::vector<bool> is_boundary(g.vertex_count(), false);
    for (const Edge& e : g.edges())
        if (assignment[e.first] != assignment[e.second])
            is_boundary[e.first] = is_boundary[e.second] = true;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (is_boundary[v]) {
            Shard& s = shards[assignment[v]];
            s.boundary.push_back(v);
            s.boundary_degrees.push_back(g.degree(v));
        }

    for (Shard& s : shards)
        s.size_bytes = 16 + 8ull * s.vertices.size() + 8ull * s.internal_edges.size() +
                       8ull * s.boundary.size();
    return shards;
}

std::vector<Shard> partition_graph(const LabeledGraph& g, std::uint32_t m, double max_spread,
                                   std::uint64_t seed) {
    return make_shards(g, partition_assignment(g, m, max_spread, seed), m);
}

std::uint64_t edge_cut(const LabeledGraph& g, std::span<const std::uint32_t> assignment) {
    std::uint64_t cut = 0;
    for (const Edge& e : g.edges())
        if (assignment[e.first] != assignment[e.second])
            ++cut;
    return cut;
}

PerfScores perf_scores(std::span<const MachineSpec> specs) {
    if (specs.empty())
        throw ConfigError("perf_scores: need at least one machine");
    PerfScores out;
    out.cpu.reserve(specs.size());
    out.gpu.reserve(specs.size());
    for (const auto& s : specs) {
        if (s.cores == 0 || s.freq_ghz <= 0 || s.mem_bandwidth_gbs <= 0 || s.gpu_tflops <= 0 ||
            s.gpu_vram_gb <= 0)
            throw ConfigError("perf_scores: machine fields must be positive");
        out.cpu.push_back(static_cast<double>(s.cores) * s.freq_ghz * s.mem_bandwidth_gbs);
        out.gpu.push_back(s.gpu_tflops * s.gpu_vram_gb);
    }
    const double cmax = *std::max_element(out.cpu.begin(), out.cpu.end());
    const double gmax = *std::max_element(out.gpu.begin(), out.gpu.end());
    for (double& v : out.cpu)
        v /= cmax;
    for (double& v : out.gpu)
        v /= gmax;
    return out;
}

void StaticCorrelation::refresh_globals() {
    n_cross_total = 0;
    max_n_cross = 0;
    max_w_label = 0.0;
    for (std::uint32_t i = 0; i < m_; ++i)
        for (std::uint32_t j = i + 1; j < m_; ++j) {
            n_cross_total += n_cross(i, j);
            max_n_cross = std::max(max_n_cross, n_cross(i, j));
            max_w_label = std::max(max_w_label, w_label(i, j));
        }
}

StaticCorrelation static_correlation(std::span<const Shard> shards, const LabeledGraph& g,
                                     std::size_t max_len) {
    const std::uint32_t m = static_cast<std::uint32_t>(shards.size());
    StaticCorrelation corr(m);

    std::vector<std::uint32_t> owner(g.vertex_count(), 0);
    for (const Shard& s : shards)
        for (VertexId v : s.vertices)
            owner[v] = s.id;

    std::vector<std::set<LabelId>> labels(m);
    for (const Shard& s : shards)
        for (VertexId v : s.vertices)
            labels[s.id].insert(g.label(v));

    for (std::uint32_t i = 0; i < m; ++i)
        for (std::uint32_t j = i; j < m; ++j) {
            if (i == j) {
                corr.set_w_label(i, j, 1.0);
                continue;
            }
            std::vector<LabelId> inter;
            std::set_intersection(labels[i].begin(), labels[i].end(), labels[j].begin(),
                                  labels[j].end(), std::back_inserter(inter));
            std::vector<LabelId> uni;
            std::set_union(labels[i].begin(), labels[i].end(), labels[j].begin(),
                           labels[j].end(), std::back_inserter(uni));
            corr.set_w_label(i, j, uni.empty() ? 0.0
                                               : static_cast<double>(inter.size()) /
                                                     static_cast<double>(uni.size()));
        }

    std::vector<std::uint32_t> touched;
    for (const PathInstance& p : enumerate_paths(g, max_len)) {
        touched.clear();
        for (VertexId v : p.vertices)
            touched.push_back(owner[v]);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (std::size_t a = 0; a < touched.size(); ++a)
            for (std::size_t b = a + 1; b < touched.size(); ++b)
                corr.set_n_cross(touched[a], touched[b],
                                 corr.n_cross(touched[a], touched[b]) + 1);
    }

    corr.refresh_globals();
    return corr;
}

DeploymentPlan allocate_shards(std::span<const Shard> shards,
                               std::span<const MachineSpec> specs,
                               const StaticCorrelation& corr) {
    const std::size_t nm = specs.size();
    if (nm == 0)
        throw ConfigError("allocate_shards: need at least one machine");

    std::uint64_t total = 0;
    for (const Shard& s : shards)
        total += s.size_bytes;
    std::uint64_t capacity = 0;
    for (const auto& ms : specs)
        capacity += ms.mem_capacity_bytes;
    if (total > capacity)
        throw ConfigError("allocate_shards: shards exceed cluster memory");

    const PerfScores perf = perf_scores(specs);
    const double cpu_sum = std::accumulate(perf.cpu.begin(), perf.cpu.end(), 0.0);

    DeploymentPlan plan;
    plan.total_bytes = total;
    plan.targets.resize(nm);
    for (std::size_t k = 0; k < nm; ++k)
        plan.targets[k] = perf.cpu[k] / cpu_sum * static_cast<double>(total);

    // Project the hardware-weighted targets into the widest band [L, L+W]
    // (W = 10% of total) that still sums to total; heterogeneous clusters get
    // as close to their weights as the spread bound allows.
    const double width = 0.10 * static_cast<double>(total);
    std::vector<double> goal = plan.targets;
    if (nm > 1) {
        double lo = 0.0, hi = static_cast<double>(total);
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            double sum = 0.0;
            for (double t : plan.targets)
                sum += std::clamp(t, mid, mid + width);
            (sum < static_cast<double>(total) ? lo : hi) = mid;
        }
        for (std::size_t k = 0; k < nm; ++k)
            goal[k] = std::clamp(plan.targets[k], lo, lo + width);
    }

    plan.shard_to_machine.assign(shards.size(), 0);
    plan.machine_bytes.assign(nm, 0);

    std::vector<std::vector<std::uint32_t>> resident(nm);
    std::vector<bool> placed(shards.size(), false);

    for (std::size_t step = 0; step < shards.size(); ++step) {
        std::size_t mach = nm;
        double best_deficit = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nm; ++k) {
            const double deficit = goal[k] - static_cast<double>(plan.machine_bytes[k]);
            if (mach == nm || deficit > best_deficit) {
                mach = k;
                best_deficit = deficit;
            }
        }

        auto fits = [&](std::uint32_t s) {
            return plan.machine_bytes[mach] + shards[s].size_bytes <=
                   specs[mach].mem_capacity_bytes;
        };

        std::uint32_t pick = static_cast<std::uint32_t>(shards.size());
        if (!resident[mach].empty()) {
            double best_aff = -1.0;
            for (std::uint32_t s = 0; s < shards.size(); ++s) {
                if (placed[s] || !fits(s))
                    continue;
                double aff = 0.0;
                for (std::uint32_t r : resident[mach])
                    aff += corr.w_label(s, r);
                aff /= static_cast<double>(resident[mach].size());
                if (aff > best_aff ||
                    (aff == best_aff && pick != shards.size() &&
                     shards[s].size_bytes > shards[pick].size_bytes)) {
                    best_aff = aff;
                    pick = s;
                }
            }
            if (pick != shards.size() && best_aff < 0.5)
                pick = static_cast<std::uint32_t>(shards.size());
        }
        if (pick == shards.size()) {
            // Fresh group (or weak affinity): largest fitting shard, breaking
            // ties toward the one least label-similar to other machines'
            // residents so distinct groups start on distinct machines.
            double best_cross = std::numeric_limits<double>::infinity();
            for (std::uint32_t s = 0; s < shards.size(); ++s) {
                if (placed[s] || !fits(s))
                    continue;
                double cross = 0.0;
                std::size_t cnt = 0;
                for (std::size_t k = 0; k < nm; ++k) {
                    if (k == mach)
                        continue;
                    for (std::uint32_t r : resident[k]) {
                        cross += corr.w_label(s, r);
                        ++cnt;
                    }
                }
                cross = cnt ? cross / static_cast<double>(cnt) : 0.0;
                if (pick == shards.size() || shards[s].size_bytes > shards[pick].size_bytes ||
                    (shards[s].size_bytes == shards[pick].size_bytes && cross < best_cross)) {
                    pick = s;
                    best_cross = cross;
                }
            }
        }
        if (pick == shards.size())
            throw ConstraintError("allocate_shards: no machine can hold remaining shards",
                                  0.0);

        placed[pick] = true;
        plan.shard_to_machine[pick] = static_cast<std::uint32_t>(mach);
        plan.machine_bytes[mach] += shards[pick].size_bytes;
        resident[mach].push_back(pick);
    }

    auto spread = [&] {
        const auto [mn, mx] =
            std::minmax_element(plan.machine_bytes.begin(), plan.machine_bytes.end());
        return static_cast<double>(*mx - *mn);
    };

    // Repair pass: shuffle shards off the heaviest machine while it shrinks
    // the byte spread.
    bool improved = nm > 1;
    while (improved && spread() > width) {
        improved = false;
        const std::size_t hi_m = static_cast<std::size_t>(
            std::max_element(plan.machine_bytes.begin(), plan.machine_bytes.end()) -
            plan.machine_bytes.begin());
        const std::size_t lo_m = static_cast<std::size_t>(
            std::min_element(plan.machine_bytes.begin(), plan.machine_bytes.end()) -
            plan.machine_bytes.begin());
        const std::uint64_t gap = plan.machine_bytes[hi_m] - plan.machine_bytes[lo_m];
        std::uint32_t pick = static_cast<std::uint32_t>(shards.size());
        for (std::uint32_t s = 0; s < shards.size(); ++s) {
            if (plan.shard_to_machine[s] != hi_m)
                continue;
            const std::uint64_t sz = shards[s].size_bytes;
            if (sz == 0 || sz >= gap)
                continue;  // keeps both machines inside the old [min, max]
            if (plan.machine_bytes[lo_m] + sz > specs[lo_m].mem_capacity_bytes)
                continue;
            if (pick == shards.size() || sz > shards[pick].size_bytes)
                pick = s;
        }
        if (pick != shards.size()) {
            plan.shard_to_machine[pick] = static_cast<std::uint32_t>(lo_m);
            plan.machine_bytes[hi_m] -= shards[pick].size_bytes;
            plan.machine_bytes[lo_m] += shards[pick].size_bytes;
            improved = true;
        }
    }

    if (nm > 1 && spread() > width)
        throw ConstraintError("allocate_shards: byte spread bound unsatisfied",
                              spread() / static_cast<double>(total));
    return plan;
}

std::vector<std::uint32_t> assign_training_tasks(std::uint32_t m,
                                                 std::span<const double> gpu_perf) {
    if (m == 0 || gpu_perf.empty())
        throw ConfigError("assign_training_tasks: need m >= 1 and >= 1 machine");
    const double sum = std::accumulate(gpu_perf.begin(), gpu_perf.end(), 0.0);
    std::vector<std::uint32_t> counts(gpu_perf.size());
    std::uint64_t assigned = 0;
    for (std::size_t k = 0; k < gpu_perf.size(); ++k) {
        counts[k] = static_cast<std::uint32_t>(std::ceil(gpu_perf[k] / sum * m));
        assigned += counts[k];
    }
    // Shed the ceiling surplus from the weakest machines, highest id first.
    while (assigned > m) {
        std::size_t victim = gpu_perf.size();
        for (std::size_t k = 0; k < gpu_perf.size(); ++k) {
            if (counts[k] == 0)
                continue;
            if (victim == gpu_perf.size() || gpu_perf[k] < gpu_perf[victim] ||
                (gpu_perf[k] == gpu_perf[victim] && k > victim))
                victim = k;
        }
        --counts[victim];
        --assigned;
    }
    return counts;
}

} // namespace pathmatch
