#include "ttkv/epoch/epoch.hpp"

#include <algorithm>

namespace ttkv::epoch {

ReadView read_view(const EpochSchedule& schedule, const Timestamp& ts_read) {
  Epoch k = schedule.ceiling_epoch(ts_read.nanos);
  return ReadView{k, schedule.promised_end(k)};
}

Epoch assign_commit_epoch(std::span<const Epoch> proposed, Epoch recorder_epoch) {
  Epoch out = recorder_epoch;
  for (Epoch e : proposed) out = std::max(out, e);
  return out;
}

}  // namespace ttkv::epoch
