#include "pathmatch/sim/clock.hpp"

#include <cassert>

namespace pathmatch::sim {

void EventQueue::schedule(Micros at, Handler fn) {
    assert(at >= now_ && "cannot schedule into the past");
    events_.emplace(std::pair{at, next_seq_++}, std::move(fn));
}

bool EventQueue::run_next() {
    if (events_.empty())
        return false;
    auto it = events_.begin();
    now_ = it->first.first;
    Handler fn = std::move(it->second);
    events_.erase(it);
    ++fired_;
    fn();
    return true;
}

void EventQueue::run_until(Micros t) {
    while (!events_.empty() && events_.begin()->first.first <= t)
        run_next();
    if (now_ < t)
        now_ = t;
}

void EventQueue::run_all() {
    while (run_next()) {
    }
}

} // namespace pathmatch::sim
