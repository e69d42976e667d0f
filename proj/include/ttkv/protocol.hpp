#pragma once

#include "ttkv/epoch/epoch.hpp"
#include "ttkv/tsbatch/batch.hpp"

namespace ttkv {

/// Knobs shared by every protocol actor of a cluster.
struct ProtocolConfig {
  tsbatch::BatchConfig ts;
  epoch::EpochSchedule epochs;
  Nanos heartbeat_interval = 100_ms;
  Nanos heartbeat_timeout = 500_ms;
  Nanos rpc_timeout = 250_ms;
  Nanos rpc_sweep = 50_ms;
  Nanos ship_interval = 1_ms;
  std::size_t ship_window = 4096;
  Nanos ship_rto = 250_ms;
  Nanos lease = 1000_ms;

  double max_drift() const { return ts.max_drift; }
  void validate() const;
};

}  // namespace ttkv
