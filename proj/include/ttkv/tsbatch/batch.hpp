#pragma once

#include <variant>

#include "ttkv/core.hpp"
#include "ttkv/truetime/clock.hpp"

namespace ttkv::tsbatch {

enum class Mode { Batched, Strawman };

const char* to_string(Mode m);
Mode parse_mode(const std::string& text);

struct BatchConfig {
  Mode mode = Mode::Batched;
  Nanos ttl = 100_us;
  Nanos step = 10;
  Nanos epsilon = 100_us;
  double max_drift = 200e-6;

  /// Throws ConfigError unless ttl > 0, step > 0 and step divides ttl.
  void validate() const;
};

/// Mandatory wait between timestamp acquisition and commit release, counted
/// on the holder's local timer.
struct CommitWaitDeadline {
  Nanos duration = 0;
  Nanos started_local = 0;

  Nanos remaining(Nanos local_now) const {
    Nanos elapsed = local_now - started_local;
    return elapsed >= duration ? 0 : duration - elapsed;
  }
};

/// 2 * (ttl + eps) * (1 + drift) in batched mode, 2 * eps * (1 + drift) in
/// strawman mode. Rounded up.
Nanos commit_wait_duration(const BatchConfig& cfg);

bool commit_wait_elapsed(const CommitWaitDeadline& deadline, Nanos local_elapsed);

struct Expired {};
struct Exhausted {};
using IssueResult = std::variant<Timestamp, Expired, Exhausted>;

/// A window of locally issuable timestamps derived from one oracle reading:
/// [latest + ttl, latest + 2 * ttl) in steps of `step`.
class TimestampBatch {
 public:
  /// `acquired_local` is the holder's local clock when the oracle request was
  /// sent; TTL is counted from there.
  static TimestampBatch build(const truetime::UncertainTime& oracle, Nanos ttl, Nanos step,
                              Nanos acquired_local = 0, NodeId issuer = 0);

  Nanos low() const { return low_; }
  Nanos up() const { return up_; }
  Nanos step() const { return step_; }
  Nanos ttl() const { return ttl_; }
  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t issued() const { return issued_; }
  ServerId server_id() const { return server_id_; }
  Nanos acquired_local() const { return acquired_local_; }

  /// Usable while elapsed * (1 + max_drift) < ttl on the local clock.
  bool live_at(Nanos local_now, double max_drift) const;

  /// Local validity left (drift-compensated), 0 once expired.
  Nanos remaining_at(Nanos local_now, double max_drift) const;

  IssueResult next(Nanos local_now, double max_drift);

  /// Skip slots so the next issued value is strictly greater than `nanos`.
  void skip_through(Nanos nanos);

 private:
  Nanos low_ = 0;
  Nanos up_ = 0;
  Nanos step_ = 1;
  Nanos ttl_ = 0;
  std::uint64_t capacity_ = 0;
  std::uint64_t issued_ = 0;
  ServerId server_id_ = 0;
  NodeId issuer_ = 0;
  Nanos acquired_local_ = 0;
};

inline TimestampBatch build_batch(const truetime::UncertainTime& oracle, Nanos ttl, Nanos step) {
  return TimestampBatch::build(oracle, ttl, step);
}

}  // namespace ttkv::tsbatch
