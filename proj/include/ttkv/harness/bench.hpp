#pragma once

#include "ttkv/tsbatch/batch.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

namespace ttkv::harness {

struct TsBenchConfig {
  tsbatch::BatchConfig ts;
  /// Requests per second of true time, evenly spaced.
  double rate = 1e6;
  Nanos duration = 100_ms;
  Nanos oracle_rtt = 18_us;
  double drift = 0;
  std::uint64_t seed = 1;
};

struct TsBenchResult {
  tsbatch::SourceStats stats;
  std::uint64_t granted = 0;
  std::uint64_t failed = 0;
  double local_ratio = 0;
  double mean_latency_ns = 0;
  Nanos p99_latency = 0;
  /// Granted timestamps per second of simulated time.
  double throughput = 0;
};

/// One node drawing timestamps from one oracle server at a fixed rate.
TsBenchResult bench_timestamps(const TsBenchConfig& cfg);

}  // namespace ttkv::harness
