#pragma once

#include <span>

#include "ttkv/core.hpp"

namespace ttkv::epoch {

/// Globally known promised epoch ends: T_n = n * interval. Epoch n spans
/// (T_{n-1}, T_n]; a node is "in epoch n" once it has cut n - 1 but not n.
struct EpochSchedule {
  Nanos interval = 100_ms;

  Nanos promised_end(Epoch n) const { return n * interval; }

  /// Smallest k with ts <= T_k.
  Epoch ceiling_epoch(Nanos ts) const { return (ts + interval - 1) / interval; }
};

/// Snapshot a replica read may observe: everything assigned to epochs <= epoch.
struct ReadView {
  Epoch epoch = 0;
  Nanos boundary = 0;
};

ReadView read_view(const EpochSchedule& schedule, const Timestamp& ts_read);

/// Commit epoch of a transaction: the maximum of every participant's proposal
/// and the recorder's own current epoch.
Epoch assign_commit_epoch(std::span<const Epoch> proposed, Epoch recorder_epoch);

}  // namespace ttkv::epoch
