#ifndef PATHMATCH_SIM_CLOCK_HPP
#define PATHMATCH_SIM_CLOCK_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <utility>

namespace pathmatch::sim {

using Micros = std::int64_t;

/// Discrete-event scheduler. Events fire in (time, insertion sequence) order,
/// which makes every run with the same schedule byte-reproducible.
class EventQueue {
public:
    using Handler = std::function<void()>;

    void schedule(Micros at, Handler fn);
    void schedule_in(Micros delay, Handler fn) { schedule(now_ + delay, std::move(fn)); }

    bool run_next();            // false when empty
    void run_until(Micros t);   // fire everything due <= t, then now() == t
    void run_all();

    Micros now() const { return now_; }
    bool empty() const { return events_.empty(); }
    std::uint64_t fired() const { return fired_; }

private:
    std::map<std::pair<Micros, std::uint64_t>, Handler> events_;
    Micros now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t fired_ = 0;
};

} // namespace pathmatch::sim

#endif
