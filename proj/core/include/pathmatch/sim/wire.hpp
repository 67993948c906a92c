#ifndef PATHMATCH_SIM_WIRE_HPP
#define PATHMATCH_SIM_WIRE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/artree.hpp"
#include "pathmatch/embedding.hpp"
#include "pathmatch/load_balance.hpp"

namespace pathmatch::sim {

using NodeId = std::uint32_t;
inline constexpr NodeId kCentralNode = 0;  // workers are machine id + 1

enum class MsgKind : std::uint8_t {
    LoadReport = 0,
    RoutingUpdate = 1,
    CandidateRequest = 2,
    CandidateReply = 3,
    CandidateNack = 4,
    FetchRequest = 5,
    FetchReply = 6,
    MigrateCommand = 7,
    MigrationData = 8,       // worker-to-worker, source -> target
    RetransmitRequest = 9,   // worker-to-worker, target -> source
    MigrationVerified = 10,
    SwitchComplete = 11,
    ReleaseShard = 12,
    MigrationAborted = 13,
};

const char* msg_kind_name(MsgKind k);

// Byte offset of the corruptible data region inside a MigrationData payload;
// the fixed header (shard, attempt, crc, length) stays intact so the receiver
// can always frame the packet.
inline constexpr std::size_t kMigrationHeaderBytes = 20;

struct LoadReportMsg {
    std::uint32_t machine = 0;
    std::vector<LoadSample> samples;

    std::vector<std::byte> encode() const;
    static LoadReportMsg decode(std::span<const std::byte> payload);
};

struct RoutingEntry {
    std::uint32_t shard = 0;
    std::uint32_t owner = 0;  // machine id
    MBRSummary summary;
};

struct RoutingUpdateMsg {
    std::uint64_t version = 0;
    std::vector<RoutingEntry> entries;

    std::vector<std::byte> encode() const;
    static RoutingUpdateMsg decode(std::span<const std::byte> payload);
};

// Serialized size of one routing entry; must stay under 1KB.
std::size_t routing_entry_bytes();

struct CandidateRequestMsg {
    std::uint64_t query_id = 0;
    std::uint32_t path_slot = 0;
    std::uint32_t shard = 0;
    bool cross_shard = false;  // this path has candidates on 2+ shards
    EmbeddingVec embedding{0.0, 0.0};
    LabelKey key;

    std::vector<std::byte> encode() const;
    static CandidateRequestMsg decode(std::span<const std::byte> payload);
};

struct CandidateReplyMsg {
    std::uint64_t query_id = 0;
    std::uint32_t path_slot = 0;
    std::uint32_t shard = 0;
    std::uint64_t nodes_visited = 0;
    std::uint64_t index_size = 0;  // entries in the shard index, for prune stats
    std::vector<PathId> ids;

    std::vector<std::byte> encode() const;
    static CandidateReplyMsg decode(std::span<const std::byte> payload);
};

struct CandidateNackMsg {
    std::uint64_t query_id = 0;
    std::uint32_t path_slot = 0;
    std::uint32_t shard = 0;
    std::uint64_t routing_version = 0;  // version the worker had when it refused

    std::vector<std::byte> encode() const;
    static CandidateNackMsg decode(std::span<const std::byte> payload);
};

struct FetchRequestMsg {
    std::uint64_t query_id = 0;
    std::uint32_t shard = 0;
    double t_up = 0.9;          // cache pressure hint computed at the central node
    std::vector<PathId> ids;
    std::vector<double> values;  // centrally computed cache values, parallel to ids

    std::vector<std::byte> encode() const;
    static FetchRequestMsg decode(std::span<const std::byte> payload);
};

enum class FetchSource : std::uint8_t { SlaveCache = 1, SlaveMemory = 2 };

struct FetchedPath {
    PathId id = 0;
    FetchSource source = FetchSource::SlaveMemory;
    std::vector<VertexId> vertices;
};

struct FetchReplyMsg {
    std::uint64_t query_id = 0;
    std::uint32_t shard = 0;
    std::vector<FetchedPath> paths;

    std::vector<std::byte> encode() const;
    static FetchReplyMsg decode(std::span<const std::byte> payload);
};

struct MigrateCommandMsg {
    std::uint32_t shard = 0;
    std::uint32_t target = 0;   // machine id
    std::uint32_t batch_id = 0; // shards dispatched together share one id

    std::vector<std::byte> encode() const;
    static MigrateCommandMsg decode(std::span<const std::byte> payload);
};

struct MigrationDataMsg {
    std::uint32_t shard = 0;
    std::uint32_t attempt = 0;  // 0 = first transmission
    std::uint32_t crc = 0;      // checksum of `blob` computed at the source
    std::vector<std::byte> blob;

    std::vector<std::byte> encode() const;
    static MigrationDataMsg decode(std::span<const std::byte> payload);
};

struct RetransmitRequestMsg {
    std::uint32_t shard = 0;
    std::uint32_t attempt = 0;

    std::vector<std::byte> encode() const;
    static RetransmitRequestMsg decode(std::span<const std::byte> payload);
};

struct MigrationVerifiedMsg {
    std::uint32_t shard = 0;
    std::uint32_t retransmits = 0;
    std::uint32_t crc = 0;

    std::vector<std::byte> encode() const;
    static MigrationVerifiedMsg decode(std::span<const std::byte> payload);
};

struct SwitchCompleteMsg {
    std::uint32_t shard = 0;

    std::vector<std::byte> encode() const;
    static SwitchCompleteMsg decode(std::span<const std::byte> payload);
};

struct ReleaseShardMsg {
    std::uint32_t shard = 0;
    bool success = true;  // false: migration aborted, keep serving

    std::vector<std::byte> encode() const;
    static ReleaseShardMsg decode(std::span<const std::byte> payload);
};

struct MigrationAbortedMsg {
    std::uint32_t shard = 0;
    std::uint32_t retransmits = 0;

    std::vector<std::byte> encode() const;
    static MigrationAbortedMsg decode(std::span<const std::byte> payload);
};

} // namespace pathmatch::sim

#endif
