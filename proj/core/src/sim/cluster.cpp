#include "pathmatch/sim/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathmatch/crc32.hpp"
#include "pathmatch/errors.hpp"
#include "pathmatch/graph_gen.hpp"
#include "pathmatch/pe_score.hpp"
#include "pathmatch/rng.hpp"

namespace pathmatch::sim {

namespace {

constexpr VertexId kUnassigned = 0xffffffffU;

double shard_load_units(const LoadSample& s, double comm_max) {
    double load = kLoadWeightCpu * s.u_cpu + kLoadWeightMem * s.mem_ratio;
    if (comm_max > 0.0)
        load += kLoadWeightComm * (s.comm_count / comm_max);
    return load;
}

double mean_path_degree(const LabeledGraph& g, std::span<const VertexId> vertices) {
    double sum = 0.0;
    for (VertexId v : vertices)
        sum += static_cast<double>(g.degree(v));
    return vertices.empty() ? 0.0 : sum / static_cast<double>(vertices.size());
}

} // namespace

struct Cluster::Worker {
    std::uint32_t machine = 0;  // bus node id = machine + 1
    std::map<std::uint32_t, ARTree> indexes;
    CacheTier slave_cache;
    RoutingUpdateMsg routing;

    // per-window activity, cleared on every load report
    std::map<std::uint32_t, double> work_us;
    std::map<std::uint32_t, std::set<std::uint64_t>> cross_queries;

    struct Outbound {
        std::uint32_t target = 0;
        std::vector<std::byte> blob;
        std::uint32_t crc = 0;
    };
    std::map<std::uint32_t, Outbound> outbound;

    struct Inbound {
        std::uint32_t source = 0;
        std::uint32_t retransmits = 0;
    };
    std::map<std::uint32_t, Inbound> inbound;
    std::map<std::uint32_t, std::vector<std::byte>> verified_blob;
};

struct Cluster::ActiveQuery {
    std::uint64_t id = 0;
    const QueryGraph* q = nullptr;
    QueryOutcome out;
    std::size_t slot = 0;
    std::set<std::uint32_t> awaiting;        // shards owing a candidate reply
    std::vector<PathId> slot_ids;            // merged candidates for this slot
    std::set<std::uint32_t> awaiting_fetch;  // shards owing a fetch reply
    std::map<PathId, std::vector<VertexId>> fetched;
    std::vector<MatchMapping> partials;
    std::set<std::uint32_t> touched;      // shards that produced candidates
    std::vector<PathId> accessed;         // every candidate instance fetched
    Micros submitted_at = 0;
    int resend_budget = 64;
    bool done = false;
};

Cluster::Cluster(const RunManifest& manifest)
    : Cluster(manifest, generate_nws(manifest.graph.n, manifest.graph.k,
                                     manifest.graph.p_add, manifest.graph.label_count,
                                     derive_seed(manifest.seed, "graph"))) {}

Cluster::~Cluster() = default;

Cluster::Cluster(const RunManifest& manifest, LabeledGraph graph)
    : manifest_(manifest),
      bus_(events_, manifest.seed),
      graph_(std::move(graph)),
      master_cache_(kMasterCacheCapacity, manifest.toggles.cache_policy) {
    if (manifest_.machines.empty())
        throw ConfigError("machines: at least one worker is required");
    if (manifest_.machines.size() > 50)
        throw ConfigError("machines: at most 50 workers are supported");
    if (manifest_.shard_count == 0)
        throw ConfigError("shard_count: must be positive");
    bus_.set_fault_probability(manifest_.fault_probability);

    const std::size_t n = manifest_.machines.size();
    const std::uint32_t m = manifest_.shard_count;
    if (m < 50 * n || m > 100 * n)
        metrics_.add("note").add("kind", "shard_count_outside_regime")
            .add("m", std::uint64_t{m}).add("workers", std::uint64_t{n});

    build_offline(manifest_.seed);
    attach_handlers();
    schedule_cadence();
}

void Cluster::build_offline(std::uint64_t seed) {
    data_max_degree_ = graph_.max_degree();
    theta_d_ = degree_threshold(graph_);

    const std::uint32_t m = manifest_.shard_count;
    std::vector<std::uint32_t> assignment =
        partition_assignment(graph_, m, 0.15, derive_seed(seed, "partition-seed"));
    shards_ = make_shards(graph_, assignment, m);

    path_store_ = enumerate_paths(graph_, 5);
    for (std::size_t i = 0; i < path_store_.size(); ++i) {
        PathInstance& p = path_store_[i];
        p.home_shard = assignment[p.vertices.front()];
        path_index_.emplace(p.vertices, static_cast<PathId>(i));
    }

    std::vector<std::vector<ARTreeEntry>> per_shard(m);
    for (std::size_t i = 0; i < path_store_.size(); ++i) {
        const PathInstance& p = path_store_[i];
        per_shard[p.home_shard].push_back(
            {static_cast<PathId>(i), dominance_embedding(p.degree_seq, data_max_degree_),
             label_key(p.vertices, graph_)});
    }
    std::vector<ARTree> trees(m);
    summaries_.resize(m);
    for (std::uint32_t s = 0; s < m; ++s) {
        trees[s] = ARTree::build(std::move(per_shard[s]));
        summaries_[s] = trees[s].summary();
    }

    static_corr_ = static_correlation(shards_, graph_, 5);
    const DeploymentPlan plan =
        allocate_shards(shards_, manifest_.machines, static_corr_);
    owner_ = plan.shard_to_machine;
    routing_version_ = 1;

    corr_state_ = CorrState(m);
    warmup_ = warmup_pseudo_queries(graph_, trees, data_max_degree_, corr_state_,
                                    manifest_.warmup_queries,
                                    derive_seed(seed, "warmup-stream"), 0);
    shard_prune_rate_ = warmup_.shard_prune_rate;

    std::span<const FeatureSnapshot> init_rows = warmup_.snapshots;
    if (init_rows.size() > kInitSnapshotCount)
        init_rows = init_rows.subspan(0, kInitSnapshotCount);
    weight_model_ =
        WeightModel::from_weights(init_weights(init_rows), derive_seed(seed, "weights"));

    std::vector<ShardFeatureSet> sets(m);
    {
        std::vector<std::vector<PathInstance>> grouped(m);
        for (const PathInstance& p : path_store_)
            grouped[p.home_shard].push_back(p);
        for (std::uint32_t s = 0; s < m; ++s)
            sets[s] = shard_features(shards_[s], graph_, grouped[s]);
    }
    global_features_ = pathmatch::global_features(sets);

    if (manifest_.toggles.ranking) {
        const std::vector<PathId> sampled =
            sample_paths(path_store_.size(), derive_seed(seed, "pe-sample"));
        const std::vector<PESample> samples =
            annotate_samples(path_store_, sampled, graph_, trees, global_features_);
        std::map<PathId, double> freq;
        for (const auto& [id, count] : warmup_.path_access_count)
            freq[id] = static_cast<double>(count);
        pe_model_ = train_pe_model(
            samples, adaptive_tree_count(samples.size()), freq);
    }

    const std::size_t n = manifest_.machines.size();
    latest_samples_.resize(n);
    machine_queries_.assign(n, 0);
    machine_cross_queries_.assign(n, 0);
    workers_.clear();
    for (std::size_t k = 0; k < n; ++k) {
        auto w = std::make_unique<Worker>();
        w->machine = static_cast<std::uint32_t>(k);
        w->slave_cache = CacheTier(kSlaveCacheCapacity, manifest_.toggles.cache_policy);
        workers_.push_back(std::move(w));
    }
    RoutingUpdateMsg routing;
    routing.version = routing_version_;
    for (std::uint32_t s = 0; s < m; ++s)
        routing.entries.push_back({s, owner_[s], summaries_[s]});
    for (std::uint32_t s = 0; s < m; ++s)
        workers_[owner_[s]]->indexes.emplace(s, std::move(trees[s]));
    for (auto& w : workers_)
        w->routing = routing;
}

void Cluster::attach_handlers() {
    bus_.attach(kCentralNode, [this](const Envelope& env) { central_receive(env); });
    for (auto& w : workers_) {
        Worker* wp = w.get();
        bus_.attach(wp->machine + 1,
                    [this, wp](const Envelope& env) { worker_receive(*wp, env); });
    }
}

void Cluster::schedule_cadence() {
    for (auto& w : workers_) {
        Worker* wp = w.get();
        events_.schedule(kLoadReportPeriod, [this, wp] { worker_load_tick(*wp); });
    }
    events_.schedule(kBalancePeriod, [this] { balance_tick(); });
}

const GBDTModel* Cluster::pe_model() const {
    return pe_model_ ? &*pe_model_ : nullptr;
}

Cluster::CacheSnapshot Cluster::cache_stats() const {
    CacheSnapshot snap;
    snap.master = master_cache_.stats();
    for (const auto& w : workers_) {
        const CacheTier::Stats& s = w->slave_cache.stats();
        snap.slaves.hits += s.hits;
        snap.slaves.misses += s.misses;
        snap.slaves.evicted_evictable += s.evicted_evictable;
        snap.slaves.evicted_normal += s.evicted_normal;
        snap.slaves.evicted_lru += s.evicted_lru;
        snap.slaves.protected_evictions += s.protected_evictions;
        snap.slaves.rejected_inserts += s.rejected_inserts;
    }
    return snap;
}

void Cluster::inject_shard_load(std::uint32_t shard, double u_cpu, double comm,
                                double mem) {
    injected_[shard] = {u_cpu, comm, mem};
}

void Cluster::migrate_shard(std::uint32_t shard, std::uint32_t target) {
    if (shard >= static_cast<std::uint32_t>(shards_.size()))
        throw ConfigError("migrate_shard: shard out of range");
    if (target >= static_cast<std::uint32_t>(workers_.size()))
        throw ConfigError("migrate_shard: target out of range");
    if (target == owner_[shard])
        throw ConfigError("migrate_shard: shard already on target");
    if (active_migrations_.count(shard))
        throw ConfigError("migrate_shard: shard already migrating");
    start_migration(shard, target, next_batch_id_++);
}

void Cluster::run_for(Micros duration) { events_.run_until(events_.now() + duration); }

// ---------------------------------------------------------------- queries --

QueryOutcome Cluster::submit_query(const QueryGraph& q) {
    if (active_query_)
        throw std::logic_error("one query at a time");
    active_query_ = std::make_unique<ActiveQuery>();
    ActiveQuery& aq = *active_query_;
    aq.id = next_query_id_++;
    aq.q = &q;
    aq.submitted_at = events_.now();
    aq.out.query_id = aq.id;
    aq.out.plan = rank_plan(q, manifest_.toggles.ranking ? pe_model() : nullptr,
                            global_features_, summaries_, data_max_degree_);
    if (manifest_.reverse_plan)
        std::reverse(aq.out.plan.paths.begin(), aq.out.plan.paths.end());
    aq.out.path_candidates.resize(aq.out.plan.paths.size());
    MatchMapping empty;
    empty.map.assign(q.vertex_count(), kUnassigned);
    aq.partials.push_back(std::move(empty));

    start_stage(aq);
    while (!aq.done) {
        if (!events_.run_next())
            throw std::logic_error("query stalled: no pending events");
    }
    QueryOutcome out = std::move(aq.out);
    active_query_.reset();
    return out;
}

void Cluster::start_stage(ActiveQuery& aq) {
    while (true) {
        if (aq.slot >= aq.out.plan.paths.size()) {
            complete_query(aq);
            return;
        }
        const PlanPath& path = aq.out.plan.paths[aq.slot];
        QueryStageStats stats;
        stats.path_slot = static_cast<std::uint32_t>(aq.slot);
        stats.partials_in = aq.partials.size();
        aq.out.stages.push_back(stats);
        aq.slot_ids.clear();
        aq.fetched.clear();

        // A dead join can never revive; later paths only constrain further.
        if (aq.partials.empty()) {
            aq.out.stages.back().partials_out = 0;
            ++aq.slot;
            continue;
        }

        const std::vector<std::uint32_t> shards =
            candidate_shards(path.embedding, path.length(), summaries_);
        if (shards.empty()) {
            join_stage(aq);
            return;
        }
        CandidateRequestMsg req;
        req.query_id = aq.id;
        req.path_slot = static_cast<std::uint32_t>(aq.slot);
        req.cross_shard = shards.size() >= 2;
        req.embedding = path.embedding;
        req.key = path.key;
        for (std::uint32_t s : shards) {
            req.shard = s;
            aq.awaiting.insert(s);
            bus_.send(kCentralNode, owner_[s] + 1, MsgKind::CandidateRequest, req.encode());
        }
        return;
    }
}

void Cluster::on_candidate_reply(const CandidateReplyMsg& msg) {
    if (!active_query_ || active_query_->id != msg.query_id)
        return;
    ActiveQuery& aq = *active_query_;
    if (msg.path_slot != aq.slot || aq.awaiting.erase(msg.shard) == 0)
        return;
    if (!msg.ids.empty()) {
        aq.touched.insert(msg.shard);
        auto& cands = aq.out.path_candidates[msg.path_slot];
        cands.insert(cands.end(), msg.ids.begin(), msg.ids.end());
        aq.slot_ids.insert(aq.slot_ids.end(), msg.ids.begin(), msg.ids.end());
    }
    if (aq.awaiting.empty())
        finish_stage(aq);
}

void Cluster::on_candidate_nack(const CandidateNackMsg& msg) {
    if (!active_query_ || active_query_->id != msg.query_id)
        return;
    ActiveQuery& aq = *active_query_;
    if (msg.path_slot != aq.slot || aq.awaiting.count(msg.shard) == 0)
        return;
    ++aq.out.nacks;
    if (--aq.resend_budget < 0)
        throw std::logic_error("candidate request kept bouncing");
    const PlanPath& path = aq.out.plan.paths[aq.slot];
    CandidateRequestMsg req;
    req.query_id = aq.id;
    req.path_slot = static_cast<std::uint32_t>(aq.slot);
    req.shard = msg.shard;
    req.cross_shard = aq.awaiting.size() >= 2;
    req.embedding = path.embedding;
    req.key = path.key;
    bus_.send(kCentralNode, owner_[msg.shard] + 1, MsgKind::CandidateRequest, req.encode());
}

void Cluster::finish_stage(ActiveQuery& aq) {
    std::sort(aq.slot_ids.begin(), aq.slot_ids.end());
    std::sort(aq.out.path_candidates[aq.slot].begin(),
              aq.out.path_candidates[aq.slot].end());
    aq.out.lookups += aq.slot_ids.size();

    const std::int64_t now_us = events_.now();
    std::map<std::uint32_t, FetchRequestMsg> misses;  // by home shard
    for (PathId id : aq.slot_ids) {
        aq.accessed.push_back(id);
        if (master_cache_.touch(id, now_us)) {
            ++aq.out.hit_master;
            aq.fetched.emplace(id, path_store_[id].vertices);
        } else {
            FetchRequestMsg& req = misses[path_store_[id].home_shard];
            req.ids.push_back(id);
            req.values.push_back(path_value(id, now_us));
        }
    }
    if (misses.empty()) {
        join_stage(aq);
        return;
    }
    const double t_up = current_t_up();
    for (auto& [shard, req] : misses) {
        req.query_id = aq.id;
        req.shard = shard;
        req.t_up = t_up;
        aq.awaiting_fetch.insert(shard);
        bus_.send(kCentralNode, owner_[shard] + 1, MsgKind::FetchRequest, req.encode());
    }
}

void Cluster::on_fetch_reply(const FetchReplyMsg& msg) {
    if (!active_query_ || active_query_->id != msg.query_id)
        return;
    ActiveQuery& aq = *active_query_;
    if (aq.awaiting_fetch.erase(msg.shard) == 0)
        return;
    const std::int64_t now_us = events_.now();
    std::vector<PathId> top50 = window_.top_n(kProtectedTopScope);
    std::sort(top50.begin(), top50.end());
    const double t_up = current_t_up();
    for (const FetchedPath& p : msg.paths) {
        if (p.source == FetchSource::SlaveCache)
            ++aq.out.hit_slave;
        aq.fetched.emplace(p.id, p.vertices);
        // promote fetched paths into the master tier, admission permitting
        CacheEntry e;
        e.id = p.id;
        e.mean_degree = mean_path_degree(graph_, p.vertices);
        e.last_access_us = now_us;
        e.value = path_value(p.id, now_us);
        master_cache_.insert(e, t_up, theta_d_, top50);
    }
    if (aq.awaiting_fetch.empty())
        join_stage(aq);
}

void Cluster::join_stage(ActiveQuery& aq) {
    const PlanPath& path = aq.out.plan.paths[aq.slot];
    QueryStageStats& stats = aq.out.stages.back();
    stats.received = aq.slot_ids.size();

    const std::vector<VertexId>& walk = path.query_vertices;
    const LabeledGraph& qg = aq.q->graph();

    // Orient every candidate instance against the query walk by exact label
    // sequence; reversible instances act as two distinct oriented sequences.
    std::vector<std::vector<VertexId>> oriented;
    for (PathId id : aq.slot_ids) {
        const auto it = aq.fetched.find(id);
        const std::vector<VertexId>& seq = it->second;
        bool fwd = seq.size() == walk.size();
        bool rev = fwd;
        for (std::size_t i = 0; i < walk.size() && (fwd || rev); ++i) {
            const LabelId want = qg.label(walk[i]);
            if (fwd && graph_.label(seq[i]) != want)
                fwd = false;
            if (rev && graph_.label(seq[seq.size() - 1 - i]) != want)
                rev = false;
        }
        if (fwd)
            oriented.push_back(seq);
        if (rev)
            oriented.emplace_back(seq.rbegin(), seq.rend());
        if (fwd || rev)
            ++stats.usable_instances;
        note_access(id);
    }
    stats.pruned_instances = stats.received - stats.usable_instances;
    stats.usable_orientations = oriented.size();

    std::vector<MatchMapping> next;
    for (const MatchMapping& partial : aq.partials) {
        for (const std::vector<VertexId>& seq : oriented) {
            MatchMapping ext = partial;
            bool ok = true;
            for (std::size_t i = 0; i < walk.size() && ok; ++i) {
                const VertexId qv = walk[i];
                const VertexId dv = seq[i];
                if (ext.map[qv] == dv)
                    continue;
                if (ext.map[qv] != kUnassigned) {
                    ok = false;
                    break;
                }
                for (VertexId other : ext.map)
                    if (other == dv) {
                        ok = false;
                        break;
                    }
                if (ok)
                    ext.map[qv] = dv;
            }
            if (ok)
                next.push_back(std::move(ext));
            else
                ++stats.extensions_pruned;
        }
    }
    stats.partials_out = next.size();
    aq.out.intermediate_total += next.size();
    aq.partials = std::move(next);

    ++aq.slot;
    start_stage(aq);
}

void Cluster::complete_query(ActiveQuery& aq) {
    for (const MatchMapping& partial : aq.partials) {
        bool complete = true;
        for (VertexId v : partial.map)
            if (v == kUnassigned) {
                complete = false;
                break;
            }
        if (complete && mapping_valid(graph_, *aq.q, partial))
            aq.out.mappings.push_back(partial);
    }
    std::sort(aq.out.mappings.begin(), aq.out.mappings.end());
    aq.out.mappings.erase(
        std::unique(aq.out.mappings.begin(), aq.out.mappings.end()),
        aq.out.mappings.end());

    // matching-contribution bookkeeping: a path "matched" when a final
    // mapping maps its plan walk onto that stored instance
    for (const MatchMapping& m : aq.out.mappings) {
        for (const PlanPath& path : aq.out.plan.paths) {
            std::vector<VertexId> image;
            image.reserve(path.query_vertices.size());
            for (VertexId qv : path.query_vertices)
                image.push_back(m.map[qv]);
            const auto it = path_index_.find(canonical_orientation(std::move(image)));
            if (it != path_index_.end())
                ++path_stats_[it->second].match_freq;
        }
    }

    std::vector<PathId> accessed = aq.accessed;
    std::sort(accessed.begin(), accessed.end());
    accessed.erase(std::unique(accessed.begin(), accessed.end()), accessed.end());
    window_.record_query(accessed);

    const std::int64_t now_us = events_.now();
    corr_state_.runtime_seconds = static_cast<double>(now_us) / 1e6;
    corr_state_.expire(now_us);
    const std::vector<std::uint32_t> touched(aq.touched.begin(), aq.touched.end());
    for (std::size_t a = 0; a < touched.size(); ++a)
        for (std::size_t b = a + 1; b < touched.size(); ++b)
            corr_state_.record_co_query(touched[a], touched[b], now_us);

    std::set<std::uint32_t> machines;
    for (std::uint32_t s : touched)
        machines.insert(owner_[s]);
    for (std::uint32_t k : machines) {
        ++machine_queries_[k];
        if (touched.size() >= 2)
            ++machine_cross_queries_[k];
    }

    aq.out.latency_ms = static_cast<double>(now_us - aq.submitted_at) / 1000.0;

    FeatureSnapshot snap;
    if (!accessed.empty()) {
        const SyncSettings sync = window_and_sync(
            static_cast<double>(completed_queries_ + 1) /
                std::max(static_cast<double>(now_us) / 1e6, 1.0),
            static_cast<std::uint32_t>(std::min<std::uint64_t>(completed_queries_ + 1, 100)));
        const FeatureWindowStats wstats{window_.max_freq(), window_.max_co_count(),
                                        sync.window_s};
        for (PathId id : accessed) {
            const PathStats& ps = path_stats_[id];
            const FeatureVec f = feature_snapshot(
                {window_.freq(id), window_.co_count(id),
                 static_cast<double>(now_us - ps.last_access_us) / 1e6, ps.match_freq,
                 ps.total_freq},
                wstats);
            for (int k = 0; k < 4; ++k)
                snap.features[k] += f[k];
        }
        for (int k = 0; k < 4; ++k)
            snap.features[k] /= static_cast<double>(accessed.size());
    }
    snap.hit = aq.out.lookups == 0
                   ? 0.0
                   : static_cast<double>(aq.out.hit_master + aq.out.hit_slave) /
                         static_cast<double>(aq.out.lookups);
    snap.latency_ms = aq.out.latency_ms;
    snapshots_.push_back(snap);
    total_lookups_ += aq.out.lookups;
    total_cache_hits_ += aq.out.hit_master + aq.out.hit_slave;

    metrics_.add("query")
        .add("id", aq.id)
        .add("latency_ms", aq.out.latency_ms)
        .add("results", static_cast<std::uint64_t>(aq.out.mappings.size()))
        .add("candidates", aq.out.intermediate_total)
        .add("lookups", aq.out.lookups)
        .add("hit_master", aq.out.hit_master)
        .add("hit_slave", aq.out.hit_slave)
        .add("nacks", aq.out.nacks)
        .add("paths", static_cast<std::uint64_t>(aq.out.plan.paths.size()))
        .add("model_version", std::uint64_t{weight_model_.version()});

    ++completed_queries_;
    if (completed_queries_ % 100 == 0)
        train_check();
    aq.done = true;
}

void Cluster::train_check() {
    double hit = 0.0, latency = 0.0;
    const std::size_t epoch = 100;
    for (std::size_t i = snapshots_.size() - epoch; i < snapshots_.size(); ++i) {
        hit += snapshots_[i].hit;
        latency += snapshots_[i].latency_ms;
    }
    hit /= static_cast<double>(epoch);
    latency /= static_cast<double>(epoch);

    const bool dropped = epoch_hit_prev_ >= 0.0 && epoch_hit_prev_ - hit >= 0.05;
    if (dropped && snapshots_.size() >= kInitSnapshotCount &&
        manifest_.toggles.cache_policy == CachePolicy::Adaptive) {
        const TrainOutcome outcome = incremental_train(
            weight_model_, snapshots_, epoch_hit_prev_, epoch_latency_prev_,
            derive_seed(manifest_.seed, "train") + trained_rounds_);
        ++trained_rounds_;
        if (outcome.accepted)
            weight_model_ = outcome.model;
        metrics_.add("train")
            .add("round", trained_rounds_)
            .add("accepted", static_cast<std::uint64_t>(outcome.accepted ? 1 : 0))
            .add("reward_old", outcome.reward_old)
            .add("reward_new", outcome.reward_new)
            .add("lambda", outcome.lambda);
    }
    epoch_hit_prev_ = hit;
    epoch_latency_prev_ = latency;
}

double Cluster::path_value(PathId id, std::int64_t now_us) {
    const PathStats& ps = path_stats_[id];
    const SyncSettings sync = window_and_sync(
        static_cast<double>(completed_queries_ + 1) /
            std::max(static_cast<double>(now_us) / 1e6, 1.0),
        static_cast<std::uint32_t>(std::min<std::uint64_t>(completed_queries_ + 1, 100)));
    const FeatureWindowStats wstats{window_.max_freq(), window_.max_co_count(),
                                    sync.window_s};
    const FeatureVec f = feature_snapshot(
        {window_.freq(id), window_.co_count(id),
         static_cast<double>(now_us - ps.last_access_us) / 1e6, ps.match_freq,
         ps.total_freq},
        wstats);
    const double d_mean = mean_path_degree(graph_, path_store_[id].vertices);
    return cache_value(f, weight_model_.forward(f), d_mean);
}

double Cluster::current_t_up() const {
    const double hit = total_lookups_ == 0 ? 1.0
                                           : static_cast<double>(total_cache_hits_) /
                                                 static_cast<double>(total_lookups_);
    double latency = 1.0;
    if (!snapshots_.empty()) {
        const std::size_t tail = std::min<std::size_t>(snapshots_.size(), 100);
        latency = 0.0;
        for (std::size_t i = snapshots_.size() - tail; i < snapshots_.size(); ++i)
            latency += snapshots_[i].latency_ms;
        latency /= static_cast<double>(tail);
    }
    return trigger_threshold(hit, latency);
}

void Cluster::note_access(PathId id) {
    PathStats& ps = path_stats_[id];
    ++ps.total_freq;
    ps.last_access_us = events_.now();
}

// -------------------------------------------------------------- balancing --

void Cluster::on_load_report(const LoadReportMsg& msg) {
    std::vector<LoadSample> samples = msg.samples;
    for (LoadSample& s : samples) {
        const auto it = injected_.find(s.shard_id);
        if (it == injected_.end())
            continue;
        s.u_cpu = std::min(1.0, s.u_cpu + it->second[0]);
        s.comm_count += it->second[1];
        s.mem_ratio = std::min(1.0, s.mem_ratio + it->second[2]);
    }
    latest_samples_[msg.machine] = std::move(samples);
}

void Cluster::balance_tick() {
    comm_max_ = 0.0;
    for (const auto& samples : latest_samples_)
        for (const LoadSample& s : samples)
            comm_max_ = std::max(comm_max_, s.comm_count);

    std::vector<double> loads(workers_.size(), 0.0);
    for (std::size_t k = 0; k < workers_.size(); ++k)
        loads[k] = machine_load(latest_samples_[k], comm_max_);
    last_view_ = cluster_stats(loads, comm_max_);

    const CacheSnapshot cache = cache_stats();
    metrics_.add("epoch")
        .add("t_ms", static_cast<double>(events_.now()) / 1000.0)
        .add("sigma", last_view_.sigma)
        .add("mean", last_view_.mean)
        .add("comm_max", comm_max_)
        .add("triggered", static_cast<std::uint64_t>(last_view_.triggered ? 1 : 0))
        .add("migrations", static_cast<std::uint64_t>(migration_log_.size()))
        .add("retransmits", retransmits_total_)
        .add("master_hits", cache.master.hits)
        .add("master_misses", cache.master.misses)
        .add("slave_hits", cache.slaves.hits)
        .add("slave_misses", cache.slaves.misses)
        .add("model_version", std::uint64_t{weight_model_.version()});

    if (manifest_.toggles.balancing && last_view_.triggered && active_migrations_.empty())
        run_balancing_round(last_view_, latest_samples_);

    events_.schedule_in(kBalancePeriod, [this] { balance_tick(); });
}

void Cluster::run_balancing_round(const ClusterLoadView& view,
                                  const std::vector<std::vector<LoadSample>>& samples) {
    corr_state_.runtime_seconds = static_cast<double>(events_.now()) / 1e6;

    double mean_size = 0.0;
    for (const Shard& s : shards_)
        mean_size += static_cast<double>(s.size_bytes);
    mean_size /= static_cast<double>(shards_.size());

    std::vector<double> projected = view.machine_load;

    for (std::uint32_t src = 0; src < workers_.size(); ++src) {
        if (view.machine_load[src] <= kLoadThreshold)
            continue;
        const double delta_l = view.machine_load[src] - kLoadThreshold;

        std::vector<double> units;
        std::vector<std::uint32_t> shard_of_unit;
        for (const LoadSample& s : samples[src]) {
            units.push_back(shard_load_units(s, comm_max_));
            shard_of_unit.push_back(s.shard_id);
        }
        if (units.empty())
            continue;
        const MigrationCount mc = migration_count(delta_l, units);

        const double f_ratio =
            machine_queries_[src] == 0
                ? 0.0
                : static_cast<double>(machine_cross_queries_[src]) /
                      static_cast<double>(machine_queries_[src]);

        // shards resident per machine under the projection so far
        std::vector<std::vector<std::uint32_t>> residents(workers_.size());
        for (std::uint32_t s = 0; s < owner_.size(); ++s)
            residents[owner_[s]].push_back(s);

        auto mean_corr_with = [&](std::uint32_t x, std::span<const std::uint32_t> others,
                                  bool labels) {
            double sum = 0.0;
            std::size_t cnt = 0;
            for (std::uint32_t y : others) {
                if (y == x)
                    continue;
                sum += labels ? static_corr_.w_label(x, y)
                              : dynamic_corr(x, y, static_corr_, corr_state_);
                ++cnt;
            }
            return cnt == 0 ? 1.0 : sum / static_cast<double>(cnt);
        };

        struct Ranked {
            std::uint32_t shard;
            double priority;
            double units;
        };
        std::vector<Ranked> ranked;
        for (std::size_t i = 0; i < units.size(); ++i) {
            const std::uint32_t x = shard_of_unit[i];
            if (corr_state_.is_migrating(x))
                continue;
            const double corr_local = residents[src].size() <= 1
                                          ? 0.0
                                          : mean_corr_with(x, residents[src], false);
            const double prio = candidate_priority(
                f_ratio, corr_local, static_cast<double>(shards_[x].size_bytes) / mean_size,
                shard_prune_rate_.empty() ? 0.0 : shard_prune_rate_[x]);
            ranked.push_back({x, prio, units[i]});
        }
        std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
            if (a.priority != b.priority)
                return a.priority > b.priority;
            return a.shard < b.shard;
        });
        if (ranked.size() > mc.m)
            ranked.resize(mc.m);

        const bool critical = delta_l > kNonCriticalDeltaL;
        std::uint32_t batch = next_batch_id_++;
        int in_batch = 0;
        for (const Ranked& cand : ranked) {
            std::vector<double> mean_corr(workers_.size(), 1.0);
            std::vector<double> mean_wl(workers_.size(), 1.0);
            for (std::uint32_t k = 0; k < workers_.size(); ++k) {
                if (k == src) {
                    mean_corr[k] = 0.0;
                    mean_wl[k] = 0.0;
                    continue;  // the source is never a target; already overloaded
                }
                if (!residents[k].empty()) {
                    mean_corr[k] = mean_corr_with(cand.shard, residents[k], false);
                    mean_wl[k] = mean_corr_with(cand.shard, residents[k], true);
                }
            }
            TargetQuery tq;
            tq.machine_loads = projected;
            tq.mean = view.mean;
            tq.sigma = view.sigma;
            tq.mean_corr = mean_corr;
            tq.mean_w_label = mean_wl;
            const std::optional<std::uint32_t> target = select_target(tq);
            if (!target) {
                metrics_.add("migration_deferred").add("shard", std::uint64_t{cand.shard});
                continue;
            }
            if (!critical && in_batch >= kMigrationBatchK) {
                batch = next_batch_id_++;
                in_batch = 0;
            }
            start_migration(cand.shard, *target, critical ? next_batch_id_++ : batch);
            ++in_batch;
            projected[src] -= cand.units;
            projected[*target] += cand.units;
            residents[*target].push_back(cand.shard);
            auto& rs = residents[src];
            rs.erase(std::remove(rs.begin(), rs.end(), cand.shard), rs.end());
        }
    }
}

void Cluster::start_migration(std::uint32_t shard, std::uint32_t target,
                              std::uint32_t batch) {
    const std::uint32_t src = owner_[shard];
    MigrationSession session;
    session.shard = shard;
    session.source = src;
    session.target = target;
    session.batch_id = batch;
    session.started_at = events_.now();
    session.source_blob = workers_[src]->indexes.at(shard).serialize();
    active_migrations_.emplace(shard, std::move(session));
    corr_state_.set_migrating(shard, true);

    MigrateCommandMsg cmd{shard, target, batch};
    bus_.send(kCentralNode, src + 1, MsgKind::MigrateCommand, cmd.encode());
}

void Cluster::broadcast_routing() {
    ++routing_version_;
    RoutingUpdateMsg msg;
    msg.version = routing_version_;
    for (std::uint32_t s = 0; s < owner_.size(); ++s)
        msg.entries.push_back({s, owner_[s], summaries_[s]});
    for (const auto& w : workers_)
        bus_.send(kCentralNode, w->machine + 1, MsgKind::RoutingUpdate, msg.encode());
}

void Cluster::on_migration_verified(const MigrationVerifiedMsg& msg) {
    const auto it = active_migrations_.find(msg.shard);
    if (it == active_migrations_.end())
        return;
    MigrationSession& session = it->second;
    session.retransmits = msg.retransmits;
    retransmits_total_ += msg.retransmits;

    // switch routing to the verified copy and tell everyone
    owner_[msg.shard] = session.target;
    broadcast_routing();
}

void Cluster::on_switch_complete(const SwitchCompleteMsg& msg) {
    const auto it = active_migrations_.find(msg.shard);
    if (it == active_migrations_.end())
        return;
    MigrationSession& session = it->second;

    const auto& blob = workers_[session.target]->verified_blob;
    const auto bit = blob.find(msg.shard);

    MigrationRecord rec;
    rec.shard = session.shard;
    rec.source = session.source;
    rec.target = session.target;
    rec.batch_id = session.batch_id;
    rec.retransmits = session.retransmits;
    rec.bytes_equal = bit != blob.end() && bit->second == session.source_blob;
    rec.started_at = session.started_at;
    rec.completed_at = events_.now();
    migration_log_.push_back(rec);

    workers_[session.target]->verified_blob.erase(msg.shard);
    corr_state_.set_migrating(msg.shard, false);

    ReleaseShardMsg rel{msg.shard, true};
    bus_.send(kCentralNode, session.source + 1, MsgKind::ReleaseShard, rel.encode());
    active_migrations_.erase(it);
}

void Cluster::on_migration_aborted(const MigrationAbortedMsg& msg) {
    const auto it = active_migrations_.find(msg.shard);
    if (it == active_migrations_.end())
        return;
    MigrationSession& session = it->second;
    retransmits_total_ += msg.retransmits;

    MigrationRecord rec;
    rec.shard = session.shard;
    rec.source = session.source;
    rec.target = session.target;
    rec.batch_id = session.batch_id;
    rec.retransmits = msg.retransmits;
    rec.aborted = true;
    rec.started_at = session.started_at;
    rec.completed_at = events_.now();
    migration_log_.push_back(rec);

    corr_state_.set_migrating(msg.shard, false);
    ReleaseShardMsg rel{msg.shard, false};
    bus_.send(kCentralNode, session.source + 1, MsgKind::ReleaseShard, rel.encode());
    active_migrations_.erase(it);
}

void Cluster::central_receive(const Envelope& env) {
    switch (env.kind) {
    case MsgKind::LoadReport:
        on_load_report(LoadReportMsg::decode(env.payload));
        break;
    case MsgKind::CandidateReply:
        on_candidate_reply(CandidateReplyMsg::decode(env.payload));
        break;
    case MsgKind::CandidateNack:
        on_candidate_nack(CandidateNackMsg::decode(env.payload));
        break;
    case MsgKind::FetchReply:
        on_fetch_reply(FetchReplyMsg::decode(env.payload));
        break;
    case MsgKind::MigrationVerified:
        on_migration_verified(MigrationVerifiedMsg::decode(env.payload));
        break;
    case MsgKind::SwitchComplete:
        on_switch_complete(SwitchCompleteMsg::decode(env.payload));
        break;
    case MsgKind::MigrationAborted:
        on_migration_aborted(MigrationAbortedMsg::decode(env.payload));
        break;
    default:
        throw std::logic_error("central node received unexpected message kind");
    }
}

// ---------------------------------------------------------------- workers --

void Cluster::worker_receive(Worker& w, const Envelope& env) {
    switch (env.kind) {
    case MsgKind::CandidateRequest:
        worker_candidate_request(w, CandidateRequestMsg::decode(env.payload));
        break;
    case MsgKind::FetchRequest:
        worker_fetch_request(w, FetchRequestMsg::decode(env.payload));
        break;
    case MsgKind::RoutingUpdate: {
        w.routing = RoutingUpdateMsg::decode(env.payload);
        for (const RoutingEntry& e : w.routing.entries) {
            if (e.owner != w.machine)
                continue;
            const auto it = w.inbound.find(e.shard);
            if (it == w.inbound.end())
                continue;
            w.inbound.erase(it);
            const std::uint32_t shard = e.shard;
            events_.schedule_in(kDwellMicros, [this, &w, shard] {
                SwitchCompleteMsg done{shard};
                bus_.send(w.machine + 1, kCentralNode, MsgKind::SwitchComplete,
                          done.encode());
            });
        }
        break;
    }
    case MsgKind::MigrateCommand:
        worker_migrate_command(w, MigrateCommandMsg::decode(env.payload));
        break;
    case MsgKind::MigrationData:
        worker_migration_data(w, env.src, MigrationDataMsg::decode(env.payload));
        break;
    case MsgKind::RetransmitRequest:
        worker_retransmit_request(w, RetransmitRequestMsg::decode(env.payload));
        break;
    case MsgKind::ReleaseShard:
        worker_release_shard(w, ReleaseShardMsg::decode(env.payload));
        break;
    default:
        throw std::logic_error("worker received unexpected message kind");
    }
}

void Cluster::worker_load_tick(Worker& w) {
    LoadReportMsg report;
    report.machine = w.machine;
    const std::uint64_t capacity =
        manifest_.machines[w.machine].mem_capacity_bytes;
    for (const auto& [shard, index] : w.indexes) {
        LoadSample s;
        s.shard_id = shard;
        s.u_cpu = std::min(1.0, w.work_us[shard] / static_cast<double>(kLoadReportPeriod));
        s.comm_count = static_cast<double>(w.cross_queries[shard].size()) *
                       (1e6 / static_cast<double>(kLoadReportPeriod));
        s.mem_ratio = capacity == 0 ? 0.0
                                    : static_cast<double>(shards_[shard].size_bytes) /
                                          static_cast<double>(capacity);
        s.timestamp_us = events_.now();
        report.samples.push_back(s);
    }
    w.work_us.clear();
    w.cross_queries.clear();
    bus_.send(w.machine + 1, kCentralNode, MsgKind::LoadReport, report.encode());
    events_.schedule_in(kLoadReportPeriod, [this, &w] { worker_load_tick(w); });
}

void Cluster::worker_candidate_request(Worker& w, const CandidateRequestMsg& msg) {
    const auto it = w.indexes.find(msg.shard);
    if (it == w.indexes.end()) {
        CandidateNackMsg nack{msg.query_id, msg.path_slot, msg.shard, w.routing.version};
        bus_.send(w.machine + 1, kCentralNode, MsgKind::CandidateNack, nack.encode());
        return;
    }
    const ARTree::FilterResult r = it->second.filter(msg.embedding, msg.key);
    const double service_us = filter_time_ms(r.nodes_visited) * 1000.0;
    w.work_us[msg.shard] += service_us;
    if (msg.cross_shard)
        w.cross_queries[msg.shard].insert(msg.query_id);

    CandidateReplyMsg reply;
    reply.query_id = msg.query_id;
    reply.path_slot = msg.path_slot;
    reply.shard = msg.shard;
    reply.nodes_visited = r.nodes_visited;
    reply.index_size = it->second.size();
    reply.ids = r.ids;
    auto payload = reply.encode();
    events_.schedule_in(static_cast<Micros>(service_us),
                        [this, &w, payload = std::move(payload)]() mutable {
                            bus_.send(w.machine + 1, kCentralNode,
                                      MsgKind::CandidateReply, std::move(payload));
                        });
}

void Cluster::worker_fetch_request(Worker& w, const FetchRequestMsg& msg) {
    FetchReplyMsg reply;
    reply.query_id = msg.query_id;
    reply.shard = msg.shard;
    const std::int64_t now_us = events_.now();
    for (std::size_t i = 0; i < msg.ids.size(); ++i) {
        const PathId id = msg.ids[i];
        FetchedPath p;
        p.id = id;
        p.vertices = path_store_[id].vertices;
        if (w.slave_cache.touch(id, now_us)) {
            p.source = FetchSource::SlaveCache;
        } else {
            p.source = FetchSource::SlaveMemory;
            CacheEntry e;
            e.id = id;
            e.value = i < msg.values.size() ? msg.values[i] : 0.0;
            e.mean_degree = mean_path_degree(graph_, p.vertices);
            e.last_access_us = now_us;
            w.slave_cache.insert(e, msg.t_up, theta_d_, {});
        }
        reply.paths.push_back(std::move(p));
    }
    w.work_us[msg.shard] += kFetchCostMicros * static_cast<double>(msg.ids.size());
    const auto service_us =
        static_cast<Micros>(kFetchCostMicros * static_cast<double>(msg.ids.size()));
    auto payload = reply.encode();
    events_.schedule_in(service_us, [this, &w, payload = std::move(payload)]() mutable {
        bus_.send(w.machine + 1, kCentralNode, MsgKind::FetchReply, std::move(payload));
    });
}

void Cluster::worker_migrate_command(Worker& w, const MigrateCommandMsg& msg) {
    const auto it = w.indexes.find(msg.shard);
    if (it == w.indexes.end())
        return;  // released meanwhile; central already moved on
    Worker::Outbound out;
    out.target = msg.target;
    out.blob = it->second.serialize();
    out.crc = crc32(out.blob);

    MigrationDataMsg data;
    data.shard = msg.shard;
    data.attempt = 0;
    data.crc = out.crc;
    data.blob = out.blob;
    bus_.send(w.machine + 1, msg.target + 1, MsgKind::MigrationData, data.encode());
    w.outbound.emplace(msg.shard, std::move(out));
}

void Cluster::worker_migration_data(Worker& w, NodeId src, const MigrationDataMsg& msg) {
    Worker::Inbound& in = w.inbound[msg.shard];
    in.source = src - 1;
    const std::uint32_t crc_here = crc32(msg.blob);
    if (crc_here != msg.crc) {
        if (in.retransmits >= static_cast<std::uint32_t>(kRetransmitBudget)) {
            MigrationAbortedMsg abort{msg.shard, in.retransmits};
            bus_.send(w.machine + 1, kCentralNode, MsgKind::MigrationAborted,
                      abort.encode());
            w.inbound.erase(msg.shard);
            return;
        }
        ++in.retransmits;
        RetransmitRequestMsg rr{msg.shard, msg.attempt + 1};
        bus_.send(w.machine + 1, in.source + 1, MsgKind::RetransmitRequest, rr.encode());
        return;
    }
    w.indexes[msg.shard] = ARTree::deserialize(msg.blob);
    w.verified_blob[msg.shard] = msg.blob;
    MigrationVerifiedMsg ok{msg.shard, in.retransmits, msg.crc};
    bus_.send(w.machine + 1, kCentralNode, MsgKind::MigrationVerified, ok.encode());
}

void Cluster::worker_retransmit_request(Worker& w, const RetransmitRequestMsg& msg) {
    const auto it = w.outbound.find(msg.shard);
    if (it == w.outbound.end())
        return;
    MigrationDataMsg data;
    data.shard = msg.shard;
    data.attempt = msg.attempt;
    data.crc = it->second.crc;
    data.blob = it->second.blob;
    bus_.send(w.machine + 1, it->second.target + 1, MsgKind::MigrationData, data.encode());
}

void Cluster::worker_release_shard(Worker& w, const ReleaseShardMsg& msg) {
    w.outbound.erase(msg.shard);
    if (msg.success)
        w.indexes.erase(msg.shard);
}

} // namespace pathmatch::sim
