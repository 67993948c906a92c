#ifndef PATHMATCH_SIM_CLUSTER_HPP
#define PATHMATCH_SIM_CLUSTER_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "pathmatch/cache.hpp"
#include "pathmatch/correlation.hpp"
#include "pathmatch/gbdt.hpp"
#include "pathmatch/graph.hpp"
#include "pathmatch/load_balance.hpp"
#include "pathmatch/manifest.hpp"
#include "pathmatch/match.hpp"
#include "pathmatch/metrics.hpp"
#include "pathmatch/paths.hpp"
#include "pathmatch/plan.hpp"
#include "pathmatch/sim/bus.hpp"
#include "pathmatch/sim/clock.hpp"
#include "pathmatch/sim/wire.hpp"
#include "pathmatch/weight_model.hpp"
#include "pathmatch/workload.hpp"

namespace pathmatch::sim {

inline constexpr Micros kLoadReportPeriod = 500'000;
inline constexpr Micros kBalancePeriod = 1'000'000;
inline constexpr std::size_t kSlaveCacheCapacity = 64;
inline constexpr std::size_t kMasterCacheCapacity = 2 * kSlaveCacheCapacity;
inline constexpr double kFetchCostMicros = 5.0;  // per path instance served

/// Join bookkeeping for one executed plan path. Conservation invariants:
///   received - usable_instances = pruned_instances
///   partials_in * usable_orientations - extensions_pruned = partials_out
struct QueryStageStats {
    std::uint32_t path_slot = 0;
    std::uint64_t received = 0;             // candidate instances fetched
    std::uint64_t usable_instances = 0;     // instances with >=1 usable orientation
    std::uint64_t pruned_instances = 0;     // label/orientation mismatches
    std::uint64_t usable_orientations = 0;  // oriented sequences entering the join
    std::uint64_t partials_in = 0;
    std::uint64_t extensions_pruned = 0;    // join-inconsistent (partial, orientation) pairs
    std::uint64_t partials_out = 0;
};

struct QueryOutcome {
    std::uint64_t query_id = 0;
    std::vector<MatchMapping> mappings;  // sorted, exact
    QueryPlan plan;
    std::vector<QueryStageStats> stages;               // execution order
    std::vector<std::vector<PathId>> path_candidates;  // parallel to plan.paths
    double latency_ms = 0.0;
    std::uint64_t intermediate_total = 0;  // sum of partials_out over stages
    std::uint64_t lookups = 0;
    std::uint64_t hit_master = 0;
    std::uint64_t hit_slave = 0;
    std::uint64_t nacks = 0;
};

struct MigrationRecord {
    std::uint32_t shard = 0;
    std::uint32_t source = 0;  // machine ids
    std::uint32_t target = 0;
    std::uint32_t batch_id = 0;
    std::uint32_t retransmits = 0;
    bool aborted = false;
    bool bytes_equal = false;  // activated blob byte-identical to the source copy
    Micros started_at = 0;
    Micros completed_at = 0;
};

/// Deterministic single-process cluster: one central router plus one actor
/// per machine, talking only through the message bus. Construction runs the
/// whole offline pipeline (generate, partition, deploy, index, warm up,
/// train); queries and balancing then advance simulated time.
class Cluster {
public:
    explicit Cluster(const RunManifest& manifest);
    Cluster(const RunManifest& manifest, LabeledGraph graph);
    ~Cluster();

    QueryOutcome submit_query(const QueryGraph& q);
    void run_for(Micros duration);
    Micros now() const { return events_.now(); }

    void set_fault_probability(double p) { bus_.set_fault_probability(p); }
    void inject_shard_load(std::uint32_t shard, double u_cpu, double comm, double mem);

    // Manually drive one hot migration, bypassing the balancer's trigger.
    // Rejects moves of shards that are already in flight or already home.
    void migrate_shard(std::uint32_t shard, std::uint32_t target);

    ClusterLoadView load_view() const { return last_view_; }
    const std::vector<MigrationRecord>& migrations() const { return migration_log_; }
    std::uint64_t retransmits_total() const { return retransmits_total_; }

    const LabeledGraph& graph() const { return graph_; }
    const std::vector<Shard>& shards() const { return shards_; }
    const std::vector<PathInstance>& path_store() const { return path_store_; }
    std::uint32_t shard_owner(std::uint32_t shard) const { return owner_[shard]; }
    std::span<const MBRSummary> routing_summaries() const { return summaries_; }
    std::uint64_t routing_version() const { return routing_version_; }
    const GBDTModel* pe_model() const;
    const GlobalFeatures& global_features() const { return global_features_; }
    const WarmupResult& warmup() const { return warmup_; }
    const WeightModel& weight_model() const { return weight_model_; }
    const MessageBus& bus() const { return bus_; }
    MetricsLog& metrics() { return metrics_; }
    const MetricsLog& metrics() const { return metrics_; }

    struct CacheSnapshot {
        CacheTier::Stats master;
        CacheTier::Stats slaves;  // summed over workers
    };
    CacheSnapshot cache_stats() const;

private:
    struct Worker;
    struct ActiveQuery;

    void build_offline(std::uint64_t seed);
    void attach_handlers();
    void schedule_cadence();

    // central-side handlers
    void central_receive(const Envelope& env);
    void on_load_report(const LoadReportMsg& msg);
    void on_candidate_reply(const CandidateReplyMsg& msg);
    void on_candidate_nack(const CandidateNackMsg& msg);
    void on_fetch_reply(const FetchReplyMsg& msg);
    void on_migration_verified(const MigrationVerifiedMsg& msg);
    void on_switch_complete(const SwitchCompleteMsg& msg);
    void on_migration_aborted(const MigrationAbortedMsg& msg);

    void balance_tick();
    void run_balancing_round(const ClusterLoadView& view,
                             const std::vector<std::vector<LoadSample>>& samples);
    void start_migration(std::uint32_t shard, std::uint32_t target, std::uint32_t batch);
    void broadcast_routing();

    // query pipeline (central side)
    void start_stage(ActiveQuery& aq);
    void finish_stage(ActiveQuery& aq);
    void join_stage(ActiveQuery& aq);
    void complete_query(ActiveQuery& aq);
    double path_value(PathId id, std::int64_t now_us);
    double current_t_up() const;
    void note_access(PathId id);
    void train_check();

    // worker-side handlers
    void worker_receive(Worker& w, const Envelope& env);
    void worker_load_tick(Worker& w);
    void worker_candidate_request(Worker& w, const CandidateRequestMsg& msg);
    void worker_fetch_request(Worker& w, const FetchRequestMsg& msg);
    void worker_migrate_command(Worker& w, const MigrateCommandMsg& msg);
    void worker_migration_data(Worker& w, NodeId src, const MigrationDataMsg& msg);
    void worker_retransmit_request(Worker& w, const RetransmitRequestMsg& msg);
    void worker_release_shard(Worker& w, const ReleaseShardMsg& msg);

    RunManifest manifest_;
    EventQueue events_;
    MessageBus bus_;
    MetricsLog metrics_;

    LabeledGraph graph_;
    std::uint32_t data_max_degree_ = 0;
    std::vector<Shard> shards_;
    std::vector<PathInstance> path_store_;
    std::map<std::vector<VertexId>, PathId> path_index_;  // canonical seq -> id
    std::vector<std::uint32_t> owner_;                    // shard -> machine
    std::vector<MBRSummary> summaries_;
    std::uint64_t routing_version_ = 0;
    StaticCorrelation static_corr_;
    CorrState corr_state_;
    GlobalFeatures global_features_;
    std::optional<GBDTModel> pe_model_;
    WarmupResult warmup_;
    WeightModel weight_model_;
    std::vector<double> shard_prune_rate_;

    std::vector<std::unique_ptr<Worker>> workers_;

    // central runtime state
    CacheTier master_cache_;
    AccessWindow window_;
    struct PathStats {
        std::int64_t last_access_us = 0;
        std::uint64_t total_freq = 0;
        std::uint64_t match_freq = 0;
    };
    std::map<PathId, PathStats> path_stats_;
    std::uint64_t total_lookups_ = 0;
    std::uint64_t total_cache_hits_ = 0;
    std::vector<FeatureSnapshot> snapshots_;
    double epoch_hit_prev_ = -1.0;
    double epoch_latency_prev_ = 1.0;
    std::uint64_t trained_rounds_ = 0;

    std::vector<std::vector<LoadSample>> latest_samples_;  // per machine
    std::map<std::uint32_t, std::array<double, 3>> injected_;  // shard -> (cpu, comm, mem)
    double comm_max_ = 0.0;
    ClusterLoadView last_view_;
    std::vector<std::uint64_t> machine_queries_;        // touched by completed queries
    std::vector<std::uint64_t> machine_cross_queries_;  // of those, cross-shard

    struct MigrationSession {
        std::uint32_t shard = 0;
        std::uint32_t source = 0;
        std::uint32_t target = 0;
        std::uint32_t batch_id = 0;
        std::vector<std::byte> source_blob;  // harness-side copy for byte audits
        Micros started_at = 0;
        std::uint32_t retransmits = 0;
    };
    std::map<std::uint32_t, MigrationSession> active_migrations_;  // by shard
    std::vector<MigrationRecord> migration_log_;
    std::uint64_t retransmits_total_ = 0;
    std::uint32_t next_batch_id_ = 0;

    std::unique_ptr<ActiveQuery> active_query_;
    std::uint64_t next_query_id_ = 0;
    std::uint64_t completed_queries_ = 0;
    double theta_d_ = 10.0;
};

} // namespace pathmatch::sim

#endif
