#include "ttkv/simnet/event_loop.hpp"

namespace ttkv::simnet {

EventLoop::EventLoop(std::uint64_t seed, std::uint64_t event_cap) : cap_(event_cap), rng_(seed) {}

void EventLoop::schedule_at(Nanos at, std::function<void()> fn) {
  if (at < now_) at = now_;
  std::uint32_t slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
    slots_[slot] = std::move(fn);
  } else {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.push_back(std::move(fn));
  }
  heap_.push(Entry{at, seq_++, slot});
}

std::uint64_t EventLoop::run_until(Nanos deadline) {
  std::uint64_t n = 0;
  while (!heap_.empty() && heap_.top().at <= deadline) {
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.at;
    std::function<void()> fn = std::move(slots_[e.slot]);
    slots_[e.slot] = nullptr;
    free_.push_back(e.slot);
    if (++processed_ > cap_) throw LivelockGuard("event cap exceeded");
    ++n;
    fn();
  }
  if (deadline > now_) now_ = deadline;
  return n;
}

}  // namespace ttkv::simnet
