#include "pathmatch/sim/wire.hpp"

#include "pathmatch/bytes.hpp"

namespace pathmatch::sim {

const char* msg_kind_name(MsgKind k) {
    switch (k) {
    case MsgKind::LoadReport: return "load_report";
    case MsgKind::RoutingUpdate: return "routing_update";
    case MsgKind::CandidateRequest: return "candidate_request";
    case MsgKind::CandidateReply: return "candidate_reply";
    case MsgKind::CandidateNack: return "candidate_nack";
    case MsgKind::FetchRequest: return "fetch_request";
    case MsgKind::FetchReply: return "fetch_reply";
    case MsgKind::MigrateCommand: return "migrate_command";
    case MsgKind::MigrationData: return "migration_data";
    case MsgKind::RetransmitRequest: return "retransmit_request";
    case MsgKind::MigrationVerified: return "migration_verified";
    case MsgKind::SwitchComplete: return "switch_complete";
    case MsgKind::ReleaseShard: return "release_shard";
    case MsgKind::MigrationAborted: return "migration_aborted";
    }
    return "unknown";
}

namespace {

void put_summary(ByteWriter& w, const MBRSummary& s) {
    w.u64(s.entry_count);
    w.f64(s.mbr.lo[0]);
    w.f64(s.mbr.lo[1]);
    w.f64(s.mbr.hi[0]);
    w.f64(s.mbr.hi[1]);
    for (std::uint64_t c : s.length_counts)
        w.u64(c);
}

MBRSummary get_summary(ByteReader& r) {
    MBRSummary s;
    s.entry_count = r.u64();
    s.mbr.lo[0] = r.f64();
    s.mbr.lo[1] = r.f64();
    s.mbr.hi[0] = r.f64();
    s.mbr.hi[1] = r.f64();
    for (std::uint64_t& c : s.length_counts)
        c = r.u64();
    return s;
}

} // namespace

std::vector<std::byte> LoadReportMsg::encode() const {
    ByteWriter w;
    w.u32(machine);
    w.u32(static_cast<std::uint32_t>(samples.size()));
    for (const LoadSample& s : samples) {
        w.u32(s.shard_id);
        w.f64(s.u_cpu);
        w.f64(s.comm_count);
        w.f64(s.mem_ratio);
        w.i64(s.timestamp_us);
    }
    return w.take();
}

LoadReportMsg LoadReportMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    LoadReportMsg m;
    m.machine = r.u32();
    const std::uint32_t n = r.u32();
    m.samples.resize(n);
    for (LoadSample& s : m.samples) {
        s.shard_id = r.u32();
        s.u_cpu = r.f64();
        s.comm_count = r.f64();
        s.mem_ratio = r.f64();
        s.timestamp_us = r.i64();
    }
    return m;
}

std::vector<std::byte> RoutingUpdateMsg::encode() const {
    ByteWriter w;
    w.u64(version);
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (const RoutingEntry& e : entries) {
        w.u32(e.shard);
        w.u32(e.owner);
        put_summary(w, e.summary);
    }
    return w.take();
}

RoutingUpdateMsg RoutingUpdateMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    RoutingUpdateMsg m;
    m.version = r.u64();
    const std::uint32_t n = r.u32();
    m.entries.resize(n);
    for (RoutingEntry& e : m.entries) {
        e.shard = r.u32();
        e.owner = r.u32();
        e.summary = get_summary(r);
    }
    return m;
}

std::size_t routing_entry_bytes() {
    RoutingUpdateMsg probe;
    probe.entries.resize(1);
    const std::size_t with_one = probe.encode().size();
    probe.entries.clear();
    return with_one - probe.encode().size();
}

std::vector<std::byte> CandidateRequestMsg::encode() const {
    ByteWriter w;
    w.u64(query_id);
    w.u32(path_slot);
    w.u32(shard);
    w.u8(cross_shard ? 1 : 0);
    w.f64(embedding[0]);
    w.f64(embedding[1]);
    w.u32(static_cast<std::uint32_t>(key.size()));
    for (LabelId l : key)
        w.u32(l);
    return w.take();
}

CandidateRequestMsg CandidateRequestMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    CandidateRequestMsg m;
    m.query_id = r.u64();
    m.path_slot = r.u32();
    m.shard = r.u32();
    m.cross_shard = r.u8() != 0;
    m.embedding[0] = r.f64();
    m.embedding[1] = r.f64();
    const std::uint32_t n = r.u32();
    m.key.resize(n);
    for (LabelId& l : m.key)
        l = r.u32();
    return m;
}

std::vector<std::byte> CandidateReplyMsg::encode() const {
    ByteWriter w;
    w.u64(query_id);
    w.u32(path_slot);
    w.u32(shard);
    w.u64(nodes_visited);
    w.u64(index_size);
    w.u32(static_cast<std::uint32_t>(ids.size()));
    for (PathId id : ids)
        w.u64(id);
    return w.take();
}

CandidateReplyMsg CandidateReplyMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    CandidateReplyMsg m;
    m.query_id = r.u64();
    m.path_slot = r.u32();
    m.shard = r.u32();
    m.nodes_visited = r.u64();
    m.index_size = r.u64();
    const std::uint32_t n = r.u32();
    m.ids.resize(n);
    for (PathId& id : m.ids)
        id = r.u64();
    return m;
}

std::vector<std::byte> CandidateNackMsg::encode() const {
    ByteWriter w;
    w.u64(query_id);
    w.u32(path_slot);
    w.u32(shard);
    w.u64(routing_version);
    return w.take();
}

CandidateNackMsg CandidateNackMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    CandidateNackMsg m;
    m.query_id = r.u64();
    m.path_slot = r.u32();
    m.shard = r.u32();
    m.routing_version = r.u64();
    return m;
}

std::vector<std::byte> FetchRequestMsg::encode() const {
    ByteWriter w;
    w.u64(query_id);
    w.u32(shard);
    w.f64(t_up);
    w.u32(static_cast<std::uint32_t>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        w.u64(ids[i]);
        w.f64(i < values.size() ? values[i] : 0.0);
    }
    return w.take();
}

FetchRequestMsg FetchRequestMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    FetchRequestMsg m;
    m.query_id = r.u64();
    m.shard = r.u32();
    m.t_up = r.f64();
    const std::uint32_t n = r.u32();
    m.ids.resize(n);
    m.values.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        m.ids[i] = r.u64();
        m.values[i] = r.f64();
    }
    return m;
}

std::vector<std::byte> FetchReplyMsg::encode() const {
    ByteWriter w;
    w.u64(query_id);
    w.u32(shard);
    w.u32(static_cast<std::uint32_t>(paths.size()));
    for (const FetchedPath& p : paths) {
        w.u64(p.id);
        w.u8(static_cast<std::uint8_t>(p.source));
        w.u32(static_cast<std::uint32_t>(p.vertices.size()));
        for (VertexId v : p.vertices)
            w.u32(v);
    }
    return w.take();
}

FetchReplyMsg FetchReplyMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    FetchReplyMsg m;
    m.query_id = r.u64();
    m.shard = r.u32();
    const std::uint32_t n = r.u32();
    m.paths.resize(n);
    for (FetchedPath& p : m.paths) {
        p.id = r.u64();
        p.source = static_cast<FetchSource>(r.u8());
        const std::uint32_t len = r.u32();
        p.vertices.resize(len);
        for (VertexId& v : p.vertices)
            v = r.u32();
    }
    return m;
}

std::vector<std::byte> MigrateCommandMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    w.u32(target);
    w.u32(batch_id);
    return w.take();
}

MigrateCommandMsg MigrateCommandMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    MigrateCommandMsg m;
    m.shard = r.u32();
    m.target = r.u32();
    m.batch_id = r.u32();
    return m;
}

std::vector<std::byte> MigrationDataMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    w.u32(attempt);
    w.u32(crc);
    w.u64(blob.size());
    w.bytes(blob);
    return w.take();
}

MigrationDataMsg MigrationDataMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    MigrationDataMsg m;
    m.shard = r.u32();
    m.attempt = r.u32();
    m.crc = r.u32();
    const std::uint64_t len = r.u64();
    auto raw = r.bytes(len);
    m.blob.assign(raw.begin(), raw.end());
    return m;
}

std::vector<std::byte> RetransmitRequestMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    w.u32(attempt);
    return w.take();
}

RetransmitRequestMsg RetransmitRequestMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    RetransmitRequestMsg m;
    m.shard = r.u32();
    m.attempt = r.u32();
    return m;
}

std::vector<std::byte> MigrationVerifiedMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    w.u32(retransmits);
    w.u32(crc);
    return w.take();
}

MigrationVerifiedMsg MigrationVerifiedMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    MigrationVerifiedMsg m;
    m.shard = r.u32();
    m.retransmits = r.u32();
    m.crc = r.u32();
    return m;
}

std::vector<std::byte> SwitchCompleteMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    return w.take();
}

SwitchCompleteMsg SwitchCompleteMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    SwitchCompleteMsg m;
    m.shard = r.u32();
    return m;
}

std::vector<std::byte> ReleaseShardMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    w.u8(success ? 1 : 0);
    return w.take();
}

ReleaseShardMsg ReleaseShardMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    ReleaseShardMsg m;
    m.shard = r.u32();
    m.success = r.u8() != 0;
    return m;
}

std::vector<std::byte> MigrationAbortedMsg::encode() const {
    ByteWriter w;
    w.u32(shard);
    w.u32(retransmits);
    return w.take();
}

MigrationAbortedMsg MigrationAbortedMsg::decode(std::span<const std::byte> payload) {
    ByteReader r(payload);
    MigrationAbortedMsg m;
    m.shard = r.u32();
    m.retransmits = r.u32();
    return m;
}

} // namespace pathmatch::sim
