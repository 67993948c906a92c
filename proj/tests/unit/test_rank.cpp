#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "pathmatch/artree.hpp"
#include "pathmatch/embedding.hpp"
#include "pathmatch/gbdt.hpp"
#include "pathmatch/graph_gen.hpp"
#include "pathmatch/partition.hpp"
#include "pathmatch/pe_score.hpp"
#include "pathmatch/plan.hpp"
#include "pathmatch/rng.hpp"
#include "pathmatch/shard_features.hpp"

using namespace pathmatch;

namespace {

struct ShardedIndex {
    LabeledGraph g;
    std::vector<PathInstance> paths;
    std::vector<std::uint32_t> assignment;
    std::vector<ARTree> trees;
    std::vector<MBRSummary> routing;
    std::vector<Shard> shards;
    GlobalFeatures gf;
};

ShardedIndex build_sharded(std::uint64_t seed, std::uint32_t n = 40,
                           std::uint32_t shard_count = 2) {
    ShardedIndex s{generate_nws(n, 4, 0.1, 3, seed), {}, {}, {}, {}, {}, {}};
    s.paths = enumerate_paths(s.g, 5);
    s.assignment = partition_assignment(s.g, shard_count, 0.15, seed);
    s.shards = make_shards(s.g, s.assignment, shard_count);

    std::vector<std::vector<ARTreeEntry>> per_shard(shard_count);
    std::vector<std::vector<PathInstance>> shard_paths(shard_count);
    for (std::size_t i = 0; i < s.paths.size(); ++i) {
        const PathInstance& p = s.paths[i];
        const std::uint32_t home = s.assignment[p.vertices.front()];
        per_shard[home].push_back(
            {static_cast<PathId>(i), dominance_embedding(p.degree_seq, s.g.max_degree()),
             label_key(p.vertices, s.g)});
        shard_paths[home].push_back(p);
    }
    std::vector<ShardFeatureSet> sets;
    for (std::uint32_t k = 0; k < shard_count; ++k) {
        s.trees.push_back(ARTree::build(std::move(per_shard[k])));
        s.routing.push_back(s.trees.back().summary());
        sets.push_back(shard_features(s.shards[k], s.g, shard_paths[k]));
    }
    s.gf = global_features(sets);
    return s;
}

std::vector<std::vector<double>> probe_rows(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i)
        rows.push_back({rng.next_double(), rng.next_double()});
    return rows;
}

} // namespace

TEST_CASE("gbdt fits constant targets exactly") {
    std::vector<std::vector<double>> rows = probe_rows(50, 1);
    std::vector<double> y(50, 3.7);
    std::vector<double> w(50, 1.0);
    GBDTModel m = GBDTModel::train(rows, y, w, GBDTParams{});
    for (const auto& r : rows)
        CHECK(m.predict(r) == doctest::Approx(3.7).epsilon(1e-9));
}

TEST_CASE("gbdt beats the mean predictor on a step function") {
    Rng rng(2);
    std::vector<std::vector<double>> rows, test_rows;
    std::vector<double> y, test_y, w;
    for (int i = 0; i < 200; ++i) {
        const double x = rng.next_double();
        const double target = x < 0.5 ? 0.0 : 1.0;
        if (i % 4 == 0) {
            test_rows.push_back({x});
            test_y.push_back(target);
        } else {
            rows.push_back({x});
            y.push_back(target);
            w.push_back(1.0);
        }
    }
    GBDTModel m = GBDTModel::train(rows, y, w, GBDTParams{});

    double mse = 0.0, mean = 0.0, var = 0.0;
    for (double t : test_y)
        mean += t;
    mean /= static_cast<double>(test_y.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
        const double d = m.predict(test_rows[i]) - test_y[i];
        mse += d * d;
        var += (test_y[i] - mean) * (test_y[i] - mean);
    }
    CHECK(mse < var);
    CHECK(mse / static_cast<double>(test_y.size()) < 0.05);
}

TEST_CASE("gbdt sample weights equal duplication") {
    std::vector<std::vector<double>> rows = probe_rows(40, 3);
    Rng rng(4);
    std::vector<double> y;
    for (const auto& r : rows)
        y.push_back(r[0] + 0.3 * r[1] + 0.05 * rng.next_double());

    // weight 3 on the first ten rows vs. those rows appearing three times
    std::vector<double> w(40, 1.0);
    for (int i = 0; i < 10; ++i)
        w[i] = 3.0;
    std::vector<std::vector<double>> dup_rows = rows;
    std::vector<double> dup_y = y, dup_w(40, 1.0);
    for (int copy = 0; copy < 2; ++copy)
        for (int i = 0; i < 10; ++i) {
            dup_rows.push_back(rows[i]);
            dup_y.push_back(y[i]);
            dup_w.push_back(1.0);
        }
    GBDTModel weighted = GBDTModel::train(rows, y, w, GBDTParams{});
    GBDTModel duplicated = GBDTModel::train(dup_rows, dup_y, dup_w, GBDTParams{});
    for (const auto& r : probe_rows(30, 5))
        CHECK(weighted.predict(r) == doctest::Approx(duplicated.predict(r)).epsilon(1e-9));

    // duplicating every sample changes nothing
    std::vector<std::vector<double>> twice_rows = rows;
    std::vector<double> twice_y = y, twice_w(80, 1.0);
    twice_rows.insert(twice_rows.end(), rows.begin(), rows.end());
    twice_y.insert(twice_y.end(), y.begin(), y.end());
    std::vector<double> ones(40, 1.0);
    GBDTModel base = GBDTModel::train(rows, y, ones, GBDTParams{});
    GBDTModel twice = GBDTModel::train(twice_rows, twice_y, twice_w, GBDTParams{});
    for (const auto& r : probe_rows(30, 6))
        CHECK(base.predict(r) == doctest::Approx(twice.predict(r)).epsilon(1e-9));
}

TEST_CASE("gbdt serialization round trip") {
    std::vector<std::vector<double>> rows = probe_rows(60, 7);
    std::vector<double> y, w(60, 1.0);
    for (const auto& r : rows)
        y.push_back(r[0] * r[0] - r[1]);
    GBDTModel m = GBDTModel::train(rows, y, w, GBDTParams{});
    std::vector<std::byte> blob = m.serialize();
    GBDTModel back = GBDTModel::deserialize(blob);
    CHECK(back.serialize() == blob);
    CHECK(back.tree_count() == m.tree_count());
    for (const auto& r : rows)
        CHECK(back.predict(r) == m.predict(r));
}

TEST_CASE("adaptive tree count") {
    CHECK(adaptive_tree_count(0) == 50);
    CHECK(adaptive_tree_count(999) == 50);
    CHECK(adaptive_tree_count(1000) == 51);
    CHECK(adaptive_tree_count(300000) == 300);
    CHECK(adaptive_tree_count(4000000000ULL) == 300);
}

TEST_CASE("filter cost model") {
    CHECK(filter_time_ms(0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(filter_time_ms(10) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("path sampling size rules") {
    std::vector<PathId> all = sample_paths(500, 1);
    CHECK(all.size() == 500);

    std::vector<PathId> floor = sample_paths(50000, 1);
    CHECK(floor.size() == 1000);

    std::vector<PathId> pct = sample_paths(200000, 1);
    CHECK(pct.size() == 2000);

    CHECK(sample_paths(50000, 1) == floor);
    CHECK(std::is_sorted(pct.begin(), pct.end()));
    CHECK(std::adjacent_find(pct.begin(), pct.end()) == pct.end());
    for (PathId id : pct)
        CHECK(id < 200000);
    CHECK(sample_paths(50000, 2) != floor);
}

TEST_CASE("shard features") {
    // one shard holding a 4-cycle: every path is degree (2,2,...), one label
    LabeledGraph square = LabeledGraph::build(
        1, {0, 0, 0, 0}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    std::vector<std::uint32_t> assign{0, 0, 0, 0};
    Shard shard = make_shards(square, assign, 1)[0];

    std::vector<PathInstance> paths = enumerate_paths(square, 5);
    ShardFeatureSet fs = shard_features(shard, square, paths);
    CHECK(fs.n_total == paths.size());
    double share_sum = 0.0;
    for (double r : fs.r)
        share_sum += r;
    CHECK(share_sum == doctest::Approx(1.0).epsilon(1e-12));
    // single label: one canonical sequence per length present
    std::set<std::size_t> lengths;
    for (const auto& p : paths)
        lengths.insert(p.length());
    CHECK(fs.d_t == lengths.size());
    CHECK(fs.d_max == 2.0);
    CHECK(fs.d_mean == doctest::Approx(2.0).epsilon(1e-12));
    // regular graph: one distinct degree, no power-law fit
    CHECK_FALSE(fs.gamma_valid);
    CHECK(fs.gamma == 0.0);

    // length-1 restriction
    std::vector<PathInstance> len1;
    for (const auto& p : paths)
        if (p.length() == 1)
            len1.push_back(p);
    ShardFeatureSet only1 = shard_features(shard, square, len1);
    CHECK(only1.r[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(only1.r[1] == 0.0);

    // star: handshake degree stats
    LabeledGraph star = LabeledGraph::build(
        1, {0, 0, 0, 0, 0, 0}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    Shard star_shard = make_shards(star, std::vector<std::uint32_t>(6, 0), 1)[0];
    ShardFeatureSet sf = shard_features(star_shard, star, enumerate_paths(star, 5));
    CHECK(sf.d_max == 5.0);
    CHECK(sf.d_mean == doctest::Approx(10.0 / 6.0).epsilon(1e-12));
    CHECK(sf.gamma_valid);
}

TEST_CASE("global feature aggregation") {
    ShardFeatureSet a;
    a.r = {0.2, 0.8, 0.0, 0.0, 0.0};
    a.n_l = {2, 8, 0, 0, 0};
    a.n_total = 10;
    a.d_t = 4;
    a.d_mean = 3.0;
    a.d_max = 7.0;
    a.gamma = 2.0;

    std::vector<ShardFeatureSet> solo{a};
    GlobalFeatures g1 = global_features(solo);
    CHECK(g1.r[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(g1.r[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(g1.d_t == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(g1.d_mean == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g1.d_max == 7.0);

    // equal counts: plain mean of shares
    ShardFeatureSet b = a, c = a;
    b.r[1] = 0.2;
    b.n_l[1] = 5;
    c.r[1] = 0.4;
    c.n_l[1] = 5;
    std::vector<ShardFeatureSet> pair{b, c};
    CHECK(global_features(pair).r[1] == doctest::Approx(0.3).epsilon(1e-12));

    // count-weighted mean of shares
    ShardFeatureSet big, small;
    small.r[0] = 1.0;
    small.n_l[0] = 10;
    small.n_total = 10;
    big.r[0] = 0.0;
    big.n_l[0] = 90;
    big.n_total = 90;
    std::vector<ShardFeatureSet> skew{small, big};
    GlobalFeatures g2 = global_features(skew);
    CHECK(g2.r[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(g2.r[2] == 0.0);  // empty bucket everywhere
}

TEST_CASE("ranking feature layout") {
    GlobalFeatures gf;
    gf.r = {0.1, 0.2, 0.3, 0.25, 0.15};
    gf.d_t = 12.0;
    gf.d_mean = 3.5;
    gf.d_max = 9.0;
    gf.gamma = 2.2;

    LabelKey key{1, 0, 2};
    std::vector<std::uint32_t> degs{2, 3, 4};
    std::vector<double> f = pe_features(gf, 3, key, true, degs);
    REQUIRE(f.size() == kPEFeatureCount);
    for (int l = 0; l < 5; ++l)
        CHECK(f[l] == gf.r[l]);
    CHECK(f[5] == 12.0);
    CHECK(f[6] == 3.5);
    CHECK(f[7] == 9.0);
    CHECK(f[8] == 2.2);
    CHECK(f[9] == 3.0);
    CHECK(f[10] == static_cast<double>(label_key_hash(key) % 1024));
    CHECK(f[11] == 1.0);
    CHECK(f[12] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f[13] == 2.0);
    CHECK(f[14] == 4.0);
    CHECK(pe_features(gf, 3, key, false, degs)[11] == 0.0);
}

TEST_CASE("sample annotation matches a linear-scan recount") {
    ShardedIndex s = build_sharded(11);
    std::vector<PathId> ids;
    for (PathId i = 0; i < std::min<std::size_t>(s.paths.size(), 80); ++i)
        ids.push_back(i);
    std::vector<PESample> samples = annotate_samples(s.paths, ids, s.g, s.trees, s.gf);
    REQUIRE(!samples.empty());

    for (const PESample& ps : samples) {
        const PathInstance& p = s.paths[ps.path_id];
        const EmbeddingVec q = dominance_embedding(p.degree_seq, s.g.max_degree());
        const LabelKey key = label_key(p.vertices, s.g);

        std::uint64_t same_len = 0, valid = 0;
        for (const PathInstance& other : s.paths) {
            if (other.length() != p.length())
                continue;
            ++same_len;
            const EmbeddingVec e = dominance_embedding(other.degree_seq, s.g.max_degree());
            if (dominates(e, q) && label_key(other.vertices, s.g) == key)
                ++valid;
        }
        CHECK(ps.n_total == same_len);
        CHECK(ps.n_valid == valid);
        CHECK(ps.pruning_rate ==
              doctest::Approx(1.0 - static_cast<double>(valid) /
                                        static_cast<double>(same_len))
                  .epsilon(1e-12));
        CHECK(ps.pruning_rate >= 0.0);
        CHECK(ps.pruning_rate <= 1.0);
        CHECK(ps.filter_time > 0.0);
        CHECK(ps.pe_score ==
              doctest::Approx(ps.pruning_rate / ps.filter_time).epsilon(1e-12));
        REQUIRE(ps.features.size() == kPEFeatureCount);
        CHECK(ps.features[9] == static_cast<double>(p.length()));
    }
}

TEST_CASE("pe model training is deterministic and frequency-weighted") {
    ShardedIndex s = build_sharded(13);
    std::vector<PathId> ids;
    for (PathId i = 0; i < std::min<std::size_t>(s.paths.size(), 120); ++i)
        ids.push_back(i);
    std::vector<PESample> samples = annotate_samples(s.paths, ids, s.g, s.trees, s.gf);
    REQUIRE(samples.size() >= 50);

    std::map<PathId, double> freq;
    GBDTModel m1 = train_pe_model(samples, 60, freq);
    GBDTModel m2 = train_pe_model(samples, 60, freq);
    CHECK(m1.serialize() == m2.serialize());
    CHECK(m1.tree_count() <= 60);

    freq[samples[0].path_id] = 50.0;
    GBDTModel m3 = train_pe_model(samples, 60, freq);
    // upweighting one sample moves the fit
    bool changed = false;
    for (const PESample& ps : samples)
        changed |= std::abs(m3.predict(ps.features) - m1.predict(ps.features)) > 1e-12;
    CHECK(changed);
}

TEST_CASE("query cover is edge-disjoint and complete") {
    LabeledGraph tri = LabeledGraph::build(1, {0, 0, 0}, {{0, 1}, {0, 2}, {1, 2}});
    QueryGraph triangle(tri);
    std::vector<std::vector<VertexId>> cover = cover_paths(triangle);
    std::set<std::pair<VertexId, VertexId>> seen;
    for (const auto& walk : cover) {
        REQUIRE(walk.size() >= 2);
        CHECK(walk.size() <= 6);
        for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
            auto e = std::minmax(walk[i], walk[i + 1]);
            CHECK(seen.emplace(e.first, e.second).second);  // exactly once
        }
    }
    CHECK(seen.size() == 3);

    LabeledGraph data = generate_nws(60, 4, 0.15, 3, 21);
    for (std::uint64_t qs = 0; qs < 10; ++qs) {
        QuerySampleParams params;
        QueryGraph q = sample_query_graph(data, params, qs);
        std::set<std::pair<VertexId, VertexId>> covered;
        for (const auto& walk : cover_paths(q)) {
            CHECK(walk.size() <= 6);
            std::set<VertexId> dedup(walk.begin(), walk.end());
            CHECK(dedup.size() == walk.size());  // simple paths only
            for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
                auto e = std::minmax(walk[i], walk[i + 1]);
                // consecutive vertices really are query edges
                auto nb = q.neighbors(walk[i]);
                CHECK(std::find(nb.begin(), nb.end(), walk[i + 1]) != nb.end());
                CHECK(covered.emplace(e.first, e.second).second);
            }
        }
        CHECK(covered.size() == q.edge_count());
    }
}

TEST_CASE("dependency pass puts the short sharer first") {
    // path 0-1-2-3 plus pendant edge 1-4: covers into a length-3 path and the
    // length-1 edge at the shared hub
    LabeledGraph g = LabeledGraph::build(
        1, {0, 0, 0, 0, 0}, {{0, 1}, {1, 2}, {2, 3}, {1, 4}});
    QueryGraph q(g);

    MBRSummary whole;
    whole.entry_count = 100;
    whole.mbr.hi = {1.0, 1.0};
    whole.length_counts = {20, 20, 20, 20, 20};
    std::vector<MBRSummary> routing{whole};

    QueryPlan plan = rank_plan(q, nullptr, GlobalFeatures{}, routing, 10);
    REQUIRE(plan.paths.size() == 2);
    CHECK(plan.paths[0].length() == 1);
    CHECK(plan.paths[1].length() == 3);
    std::set<VertexId> first(plan.paths[0].query_vertices.begin(),
                             plan.paths[0].query_vertices.end());
    bool shares = false;
    for (VertexId v : plan.paths[1].query_vertices)
        shares |= first.count(v) != 0;
    CHECK(shares);
}

TEST_CASE("candidate shards respect counts and dominance") {
    MBRSummary low;
    low.entry_count = 5;
    low.mbr.hi = {0.5, 0.5};
    low.length_counts = {0, 5, 0, 0, 0};
    MBRSummary high;
    high.entry_count = 10;
    high.mbr.hi = {1.0, 1.0};
    high.length_counts = {0, 3, 7, 0, 0};
    std::vector<MBRSummary> routing{low, high};

    CHECK(candidate_shards({0.4, 0.4}, 2, routing) ==
          std::vector<std::uint32_t>{0, 1});
    CHECK(candidate_shards({0.6, 0.6}, 2, routing) == std::vector<std::uint32_t>{1});
    CHECK(candidate_shards({0.1, 0.1}, 3, routing) == std::vector<std::uint32_t>{1});
    CHECK(candidate_shards({0.1, 0.1}, 1, routing).empty());
    // dominance is element-wise: one axis over the corner disqualifies
    CHECK(candidate_shards({0.4, 0.6}, 2, routing) == std::vector<std::uint32_t>{1});
}

TEST_CASE("ranked plans are deterministic, consistent, and grouped") {
    ShardedIndex s = build_sharded(17, 60, 3);

    std::vector<PathId> ids;
    for (PathId i = 0; i < std::min<std::size_t>(s.paths.size(), 150); ++i)
        ids.push_back(i);
    std::vector<PESample> samples = annotate_samples(s.paths, ids, s.g, s.trees, s.gf);
    REQUIRE(samples.size() >= 50);
    GBDTModel model = train_pe_model(samples, 50, {});

    for (std::uint64_t qs = 0; qs < 8; ++qs) {
        QuerySampleParams params;
        QueryGraph q = sample_query_graph(s.g, params, qs);

        QueryPlan p1 = rank_plan(q, &model, s.gf, s.routing, s.g.max_degree());
        QueryPlan p2 = rank_plan(q, &model, s.gf, s.routing, s.g.max_degree());
        REQUIRE(p1.paths.size() == p2.paths.size());

        std::set<std::pair<VertexId, VertexId>> covered;
        std::vector<std::uint32_t> group_order;
        for (std::size_t i = 0; i < p1.paths.size(); ++i) {
            const PlanPath& pp = p1.paths[i];
            CHECK(pp.query_vertices == p2.paths[i].query_vertices);
            CHECK(pp.pe_pred == p2.paths[i].pe_pred);

            // fields agree with the walk through the query graph
            std::vector<LabelId> labels;
            std::vector<std::uint32_t> degs;
            for (VertexId v : pp.query_vertices) {
                labels.push_back(q.label(v));
                degs.push_back(q.degree(v));
            }
            CHECK(pp.key == label_key(labels));
            CHECK(pp.degree_seq == degs);
            CHECK(pp.embedding ==
                  dominance_embedding(pp.degree_seq, s.g.max_degree()));
            std::vector<std::uint32_t> cands =
                candidate_shards(pp.embedding, pp.length(), s.routing);
            CHECK(pp.cross_shard == (cands.size() >= 2));
            if (!cands.empty())
                CHECK(std::find(cands.begin(), cands.end(), pp.main_shard) !=
                      cands.end());

            for (std::size_t k = 0; k + 1 < pp.query_vertices.size(); ++k) {
                auto e = std::minmax(pp.query_vertices[k], pp.query_vertices[k + 1]);
                CHECK(covered.emplace(e.first, e.second).second);
            }
            if (group_order.empty() || group_order.back() != pp.main_shard)
                group_order.push_back(pp.main_shard);
        }
        CHECK(covered.size() == q.edge_count());
        // grouping: each main shard forms one contiguous run
        std::set<std::uint32_t> distinct(group_order.begin(), group_order.end());
        CHECK(distinct.size() == group_order.size());
    }
}
