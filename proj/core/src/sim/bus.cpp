#include "pathmatch/sim/bus.hpp"

#include <memory>
#include <utility>

#include "pathmatch/errors.hpp"

namespace pathmatch::sim {

void MessageBus::attach(NodeId node, Receiver r) {
    if (receivers_.size() <= node)
        receivers_.resize(node + 1);
    receivers_[node] = std::move(r);
}

void MessageBus::set_fault_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("fault probability must lie in [0, 1]");
    fault_p_ = p;
}

void MessageBus::send(NodeId src, NodeId dst, MsgKind kind, std::vector<std::byte> payload) {
    ++sent_;
    auto env = std::make_shared<Envelope>();
    env->src = src;
    env->dst = dst;
    env->kind = kind;
    env->payload = std::move(payload);
    env->sent_at = events_->now();

    if (kind == MsgKind::MigrationData && fault_p_ > 0.0 &&
        env->payload.size() > kMigrationHeaderBytes && rng_.next_bernoulli(fault_p_)) {
        const std::size_t region = env->payload.size() - kMigrationHeaderBytes;
        const std::uint64_t flips = 1 + rng_.next_below(4);
        for (std::uint64_t i = 0; i < flips; ++i) {
            const std::size_t off = kMigrationHeaderBytes + rng_.next_below(region);
            const auto mask = static_cast<std::byte>(1 + rng_.next_below(255));
            env->payload[off] ^= mask;
        }
        env->corrupted = true;
        ++corrupted_;
    }

    const Micros delay =
        kBaseLatencyMicros + static_cast<Micros>(env->payload.size() / kBytesPerMicro);
    env->delivered_at = env->sent_at + delay;

    log_.push_back({env->sent_at, src, dst, kind, env->payload.size()});

    events_->schedule(env->delivered_at, [this, env] {
        if (env->dst < receivers_.size() && receivers_[env->dst])
            receivers_[env->dst](*env);
    });
}

} // namespace pathmatch::sim
