#include "ttkv/tsbatch/batch.hpp"

#include <cmath>

namespace ttkv::tsbatch {

const char* to_string(Mode m) { return m == Mode::Batched ? "batched" : "strawman"; }

Mode parse_mode(const std::string& text) {
  if (text == "batched") return Mode::Batched;
  if (text == "strawman") return Mode::Strawman;
  throw ConfigError("unknown timestamp mode: " + text);
}

void BatchConfig::validate() const {
  if (ttl == 0) throw ConfigError("ttl must be positive");
  if (step == 0) throw ConfigError("step must be positive");
  if (ttl % step != 0) throw ConfigError("step must divide ttl");
  if (max_drift < 0) throw ConfigError("max_drift must be non-negative");
}

namespace {

Nanos scaled_up(Nanos value, double max_drift) {
  return static_cast<Nanos>(std::ceil(static_cast<long double>(value) * (1.0L + max_drift)));
}

}  // namespace

Nanos commit_wait_duration(const BatchConfig& cfg) {
  Nanos base = cfg.mode == Mode::Batched ? 2 * (cfg.ttl + cfg.epsilon) : 2 * cfg.epsilon;
  return scaled_up(base, cfg.max_drift);
}

bool commit_wait_elapsed(const CommitWaitDeadline& deadline, Nanos local_elapsed) {
  return local_elapsed >= deadline.duration;
}

TimestampBatch TimestampBatch::build(const truetime::UncertainTime& oracle, Nanos ttl, Nanos step,
                                     Nanos acquired_local, NodeId issuer) {
  if (ttl == 0) throw ConfigError("ttl must be positive");
  if (step == 0) throw ConfigError("step must be positive");
  TimestampBatch b;
  b.low_ = oracle.latest + ttl;
  b.up_ = oracle.latest + 2 * ttl;
  b.step_ = step;
  b.ttl_ = ttl;
  b.capacity_ = ttl / step;
  b.server_id_ = oracle.server_id;
  b.issuer_ = issuer;
  b.acquired_local_ = acquired_local;
  return b;
}

bool TimestampBatch::live_at(Nanos local_now, double max_drift) const {
  if (local_now < acquired_local_) return true;
  return scaled_up(local_now - acquired_local_, max_drift) < ttl_;
}

Nanos TimestampBatch::remaining_at(Nanos local_now, double max_drift) const {
  Nanos used = local_now < acquired_local_ ? 0 : scaled_up(local_now - acquired_local_, max_drift);
  return used >= ttl_ ? 0 : ttl_ - used;
}

IssueResult TimestampBatch::next(Nanos local_now, double max_drift) {
  if (!live_at(local_now, max_drift)) return Expired{};
  if (issued_ >= capacity_) return Exhausted{};
  Timestamp ts{low_ + issued_ * step_, server_id_, issuer_};
  ++issued_;
  return ts;
}

void TimestampBatch::skip_through(Nanos nanos) {
  if (nanos < low_) return;
  std::uint64_t slots = (nanos - low_) / step_ + 1;
  if (slots > issued_) issued_ = std::min<std::uint64_t>(slots, capacity_);
}

}  // namespace ttkv::tsbatch
