#ifndef PATHMATCH_SIM_BUS_HPP
#define PATHMATCH_SIM_BUS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pathmatch/rng.hpp"
#include "pathmatch/sim/clock.hpp"
#include "pathmatch/sim/wire.hpp"

namespace pathmatch::sim {

inline constexpr Micros kBaseLatencyMicros = 200;
inline constexpr std::size_t kBytesPerMicro = 64;

struct Envelope {
    NodeId src = 0;
    NodeId dst = 0;
    MsgKind kind{};
    std::vector<std::byte> payload;
    Micros sent_at = 0;
    Micros delivered_at = 0;
    bool corrupted = false;
};

/// Deterministic transport: fixed base latency plus a size-proportional term.
/// The fault injector flips 1-4 bytes of a MigrationData payload's data
/// region (never the framing header) with the configured probability.
class MessageBus {
public:
    MessageBus(EventQueue& events, std::uint64_t seed)
        : events_(&events), rng_(derive_seed(seed, "bus")) {}

    using Receiver = std::function<void(const Envelope&)>;
    void attach(NodeId node, Receiver r);

    void send(NodeId src, NodeId dst, MsgKind kind, std::vector<std::byte> payload);

    void set_fault_probability(double p);  // throws ConfigError outside [0,1]
    double fault_probability() const { return fault_p_; }

    struct LogEntry {
        Micros at = 0;
        NodeId src = 0;
        NodeId dst = 0;
        MsgKind kind{};
        std::size_t bytes = 0;
    };
    const std::vector<LogEntry>& log() const { return log_; }

    std::uint64_t sent_count() const { return sent_; }
    std::uint64_t corrupted_count() const { return corrupted_; }

private:
    EventQueue* events_;
    Rng rng_;
    double fault_p_ = 0.0;
    std::vector<Receiver> receivers_;
    std::vector<LogEntry> log_;
    std::uint64_t sent_ = 0;
    std::uint64_t corrupted_ = 0;
};

} // namespace pathmatch::sim

#endif
