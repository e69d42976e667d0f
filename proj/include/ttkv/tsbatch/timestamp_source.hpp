#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>

#include "ttkv/simnet/runtime.hpp"
#include "ttkv/tsbatch/batch.hpp"

namespace ttkv::tsbatch {

struct TsGrant {
  Timestamp ts;
  CommitWaitDeadline cwt;
};

struct SourceStats {
  std::uint64_t requests = 0;
  /// Requests answered from a live batch without waiting on the oracle.
  std::uint64_t local = 0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t expired_on_arrival = 0;
  std::uint64_t failures = 0;
  std::uint64_t max_capacity = 0;
};

/// Per-node timestamp service. In batched mode it keeps one batch, refetches
/// on expiry or exhaustion (at most one fetch in flight) and prefetches when
/// the batch is about to expire. In strawman mode every request is an oracle
/// round trip.
class TimestampSource {
 public:
  using Callback = std::function<void(std::optional<TsGrant>)>;

  static constexpr int kMaxAttempts = 3;

  TimestampSource(simnet::Env& env, BatchConfig cfg, NodeId oracle);

  void acquire(Callback cb);

  /// Consumes OracleResp messages addressed to this source.
  bool handle(const simnet::Message& m);

  void reset();

  const BatchConfig& config() const { return cfg_; }
  const SourceStats& stats() const { return stats_; }
  Nanos commit_wait() const { return commit_wait_; }
  Nanos observed_rtt() const { return observed_rtt_; }

 private:
  std::optional<TsGrant> try_issue();
  void fetch();
  void on_reading(const truetime::OracleReading& r, Nanos sent_local);
  void on_failure();
  void drain_waiters();
  void maybe_prefetch();
  void strawman_request(Callback cb, int attempt);

  simnet::Env& env_;
  BatchConfig cfg_;
  NodeId oracle_;
  Nanos commit_wait_;
  Nanos timeout_;
  std::optional<TimestampBatch> batch_;
  std::deque<Callback> waiters_;
  bool in_flight_ = false;
  simnet::ReqId in_flight_req_ = 0;
  Nanos in_flight_sent_ = 0;
  int attempts_ = 0;
  bool demand_ = false;
  Nanos observed_rtt_ = 0;
  std::optional<Nanos> last_issued_;
  simnet::ReqId next_req_ = 1;
  std::uint64_t generation_ = 0;
  struct StrawmanCall {
    Callback cb;
    Nanos sent_local;
    int attempt;
  };
  std::unordered_map<simnet::ReqId, StrawmanCall> strawman_;
  SourceStats stats_;
};

}  // namespace ttkv::tsbatch
