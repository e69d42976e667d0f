#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "ttkv/core.hpp"

namespace ttkv::simnet {

/// Raised when a run processes more events than its configured cap.
class LivelockGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Virtual-time discrete-event loop. Events fire in (time, insertion order).
/// The clock here is ground truth; protocol code never holds a reference.
class EventLoop {
 public:
  explicit EventLoop(std::uint64_t seed, std::uint64_t event_cap = 200'000'000);

  Nanos now() const { return now_; }
  std::mt19937_64& rng() { return rng_; }
  std::uint64_t processed() const { return processed_; }
  std::size_t pending() const { return heap_.size(); }

  void schedule_at(Nanos at, std::function<void()> fn);
  void schedule_after(Nanos delay, std::function<void()> fn) { schedule_at(now_ + delay, std::move(fn)); }

  /// Process every event with time <= deadline, then advance the clock to
  /// the deadline. Returns the number of events processed by this call.
  std::uint64_t run_until(Nanos deadline);

 private:
  struct Entry {
    Nanos at;
    std::uint64_t seq;
    std::uint32_t slot;
    bool operator>(const Entry& o) const { return at != o.at ? at > o.at : seq > o.seq; }
  };

  Nanos now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t cap_;
  std::mt19937_64 rng_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
  std::vector<std::function<void()>> slots_;
  std::vector<std::uint32_t> free_;
};

}  // namespace ttkv::simnet
