#pragma once

#include <string>
#include <vector>

#include "ttkv/harness/history.hpp"

namespace ttkv::harness {

struct VisibilitySample {
  TxnId txn;
  Nanos committed_at = 0;
  Epoch epoch = 0;
  /// From the commit reply until every replica of every written partition
  /// has replayed the commit epoch.
  Nanos delay = 0;
};

struct VisibilityReport {
  std::vector<VisibilitySample> samples;
  /// Committed writers whose epoch some replica never replayed.
  std::size_t unresolved = 0;
  Nanos max = 0;
  Nanos p50 = 0;
  Nanos p90 = 0;
  Nanos p99 = 0;
};

/// `tag`: only transactions with this workload tag (empty: all).
VisibilityReport measure_visibility(const History& h, const std::string& tag = "");

struct PeriodEstimate {
  bool found = false;
  Nanos period = 0;
  double peak = 0;
};

/// Autocorrelation of the delay series (binned by commit instant, empty bins
/// holding the previous value), maximized over lags in [lo, hi].
PeriodEstimate dominant_period(const std::vector<VisibilitySample>& samples, Nanos lo, Nanos hi, Nanos bin = 1_ms);

}  // namespace ttkv::harness
