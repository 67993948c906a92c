#ifndef PATHMATCH_PARTITION_HPP
#define PATHMATCH_PARTITION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/graph.hpp"

namespace pathmatch {

struct Shard {
    std::uint32_t id = 0;
    std::vector<VertexId> vertices;            // sorted
    std::vector<Edge> internal_edges;          // u < v, sorted
    std::vector<VertexId> boundary;            // sorted, vertices with >=1 cross edge
    std::vector<std::uint32_t> boundary_degrees;  // global degree, parallel to boundary
    std::uint64_t size_bytes = 0;
};

struct MachineSpec {
    std::uint32_t id = 0;
    std::uint32_t cores = 1;
    double freq_ghz = 1.0;
    double mem_bandwidth_gbs = 1.0;
    double gpu_tflops = 1.0;
    double gpu_vram_gb = 1.0;
    std::uint64_t mem_capacity_bytes = 0;

    bool operator==(const MachineSpec&) const = default;
};

struct PerfScores {
    std::vector<double> cpu;  // each in (0,1], best machine = 1.0
    std::vector<double> gpu;
};

struct DeploymentPlan {
    std::vector<std::uint32_t> shard_to_machine;
    std::vector<std::uint64_t> machine_bytes;
    std::vector<double> targets;  // w_k * TotalSize before feasibility projection
    std::uint64_t total_bytes = 0;
};

class StaticCorrelation {
public:
    StaticCorrelation() = default;
    explicit StaticCorrelation(std::uint32_t shard_count)
        : m_(shard_count),
          n_cross_(static_cast<std::size_t>(shard_count) * shard_count, 0),
          w_label_(static_cast<std::size_t>(shard_count) * shard_count, 0.0) {}

    std::uint32_t shard_count() const { return m_; }

    std::uint64_t n_cross(std::uint32_t i, std::uint32_t j) const { return n_cross_[idx(i, j)]; }
    double w_label(std::uint32_t i, std::uint32_t j) const { return w_label_[idx(i, j)]; }

    void set_n_cross(std::uint32_t i, std::uint32_t j, std::uint64_t v) {
        n_cross_[idx(i, j)] = v;
        n_cross_[idx(j, i)] = v;
    }
    void set_w_label(std::uint32_t i, std::uint32_t j, double v) {
        w_label_[idx(i, j)] = v;
        w_label_[idx(j, i)] = v;
    }

    void refresh_globals();

    std::uint64_t n_cross_total = 0;  // sum over unordered pairs
    std::uint64_t max_n_cross = 0;    // max over unordered pairs
    double max_w_label = 0.0;         // max off-diagonal

private:
    std::size_t idx(std::uint32_t i, std::uint32_t j) const {
        return static_cast<std::size_t>(i) * m_ + j;
    }

    std::uint32_t m_ = 0;
    std::vector<std::uint64_t> n_cross_;
    std::vector<double> w_label_;
};

/// Multilevel m-way partitioner: heavy-edge-matching coarsening, greedy
/// BFS-growth initial split, and boundary refinement, keeping
/// (max shard vertices - min shard vertices) / mean <= max_spread.
/// Throws ConstraintError naming the achievable spread when m does not divide
/// |V| finely enough for the bound.
std::vector<std::uint32_t> partition_assignment(const LabeledGraph& g, std::uint32_t m,
                                                double max_spread = 0.15,
                                                std::uint64_t seed = 0);

std::vector<Shard> partition_graph(const LabeledGraph& g, std::uint32_t m,
                                   double max_spread = 0.15, std::uint64_t seed = 0);

std::vector<Shard> make_shards(const LabeledGraph& g,
                               std::span<const std::uint32_t> assignment, std::uint32_t m);

std::uint64_t edge_cut(const LabeledGraph& g, std::span<const std::uint32_t> assignment);

PerfScores perf_scores(std::span<const MachineSpec> specs);

/// Greedy hardware-weighted placement: largest-deficit machine first, shards
/// chosen by label affinity with the machine's current residents when that
/// affinity is >= 0.5, otherwise by size. Final per-machine byte spread is
/// kept within 10% of total bytes; throws ConstraintError with the best
/// spread found when that fails.
DeploymentPlan allocate_shards(std::span<const Shard> shards,
                               std::span<const MachineSpec> specs,
                               const StaticCorrelation& corr);

StaticCorrelation static_correlation(std::span<const Shard> shards, const LabeledGraph& g,
                                     std::size_t max_len);

std::vector<std::uint32_t> assign_training_tasks(std::uint32_t m,
                                                 std::span<const double> gpu_perf);

} // namespace pathmatch

#endif
