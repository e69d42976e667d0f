#pragma once

#include <functional>

#include "ttkv/epoch/epoch.hpp"
#include "ttkv/simnet/runtime.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

namespace ttkv::epoch {

/// Local timer for the first cut: interval * (1 + drift), rounded up.
Nanos first_cut_timer(Nanos interval, double max_drift);

/// Timer armed after cutting epoch n with timestamp `ts`:
/// (interval + T_n - ts) * (1 + drift), clamped at zero.
Nanos next_cut_timer(Nanos interval, Nanos promised_end, Nanos ts, double max_drift);

/// Timer-driven epoch cutting. A cut of epoch n is made only once a timestamp
/// above T_n has been obtained and its commit wait has elapsed, so the cut's
/// true instant exceeds T_n.
class EpochCutter {
 public:
  using OnCut = std::function<void(Epoch)>;

  EpochCutter(simnet::Env& env, tsbatch::TimestampSource& ts, EpochSchedule schedule, double max_drift, OnCut on_cut);

  /// `next` is the first epoch still to be cut. `immediate` skips the first
  /// timer (recovery, where the promised end may already have passed).
  void start(Epoch next, bool immediate);
  void stop() { ++generation_; running_ = false; }

  /// Epoch in force: the lowest epoch not yet cut.
  Epoch current() const { return next_; }
  const EpochSchedule& schedule() const { return schedule_; }

 private:
  void fire(std::uint64_t gen);
  void arm(Nanos local_delay);

  simnet::Env& env_;
  tsbatch::TimestampSource& ts_;
  EpochSchedule schedule_;
  double max_drift_;
  OnCut on_cut_;
  Epoch next_ = 1;
  std::uint64_t generation_ = 0;
  bool running_ = false;
};

}  // namespace ttkv::epoch
