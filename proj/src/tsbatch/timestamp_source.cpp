#include "ttkv/tsbatch/timestamp_source.hpp"

#include <algorithm>

namespace ttkv::tsbatch {

namespace {
constexpr Nanos kRetryBackoff = 1_ms;
}

TimestampSource::TimestampSource(simnet::Env& env, BatchConfig cfg, NodeId oracle)
    : env_(env), cfg_(cfg), oracle_(oracle), commit_wait_(commit_wait_duration(cfg)), timeout_(1_ms) {
  cfg_.validate();
}

void TimestampSource::reset() {
  batch_.reset();
  waiters_.clear();
  strawman_.clear();
  in_flight_ = false;
  attempts_ = 0;
  demand_ = false;
  ++generation_;
}

void TimestampSource::acquire(Callback cb) {
  ++stats_.requests;
  if (cfg_.mode == Mode::Strawman) {
    strawman_request(std::move(cb), 0);
    return;
  }
  if (waiters_.empty()) {
    if (auto g = try_issue()) {
      ++stats_.local;
      cb(*g);
      maybe_prefetch();
      return;
    }
  }
  waiters_.push_back(std::move(cb));
  if (!in_flight_) fetch();
}

std::optional<TsGrant> TimestampSource::try_issue() {
  if (!batch_) return std::nullopt;
  Nanos now = env_.local_now();
  IssueResult r = batch_->next(now, cfg_.max_drift);
  auto* ts = std::get_if<Timestamp>(&r);
  if (!ts) return std::nullopt;
  last_issued_ = ts->nanos;
  demand_ = true;
  return TsGrant{*ts, CommitWaitDeadline{commit_wait_, now}};
}

void TimestampSource::maybe_prefetch() {
  if (in_flight_ || !batch_ || !demand_ || observed_rtt_ == 0) return;
  if (batch_->remaining_at(env_.local_now(), cfg_.max_drift) < 2 * observed_rtt_) fetch();
}

void TimestampSource::fetch() {
  in_flight_ = true;
  demand_ = false;
  ++stats_.oracle_calls;
  in_flight_req_ = next_req_++;
  in_flight_sent_ = env_.local_now();
  env_.send(oracle_, simnet::OracleReq{in_flight_req_});
  env_.after(timeout_, [this, req = in_flight_req_, gen = generation_] {
    if (gen != generation_ || !in_flight_ || in_flight_req_ != req) return;
    in_flight_ = false;
    on_failure();
  });
}

bool TimestampSource::handle(const simnet::Message& m) {
  const auto* resp = std::get_if<simnet::OracleResp>(&m);
  if (!resp) return false;
  if (cfg_.mode == Mode::Strawman) {
    auto it = strawman_.find(resp->req);
    if (it == strawman_.end()) return true;
    StrawmanCall call = std::move(it->second);
    strawman_.erase(it);
    if (resp->reading.status != truetime::OracleReading::Status::Ok) {
      ++stats_.failures;
      if (call.attempt + 1 >= kMaxAttempts) {
        call.cb(std::nullopt);
      } else {
        env_.after(kRetryBackoff, [this, cb = std::move(call.cb), a = call.attempt + 1, gen = generation_]() mutable {
          if (gen == generation_) strawman_request(std::move(cb), a);
        });
      }
      return true;
    }
    Nanos now = env_.local_now();
    observed_rtt_ = now - call.sent_local;
    Timestamp ts{resp->reading.time.latest, resp->reading.time.server_id, env_.self()};
    call.cb(TsGrant{ts, CommitWaitDeadline{commit_wait_, now}});
    return true;
  }
  if (!in_flight_ || resp->req != in_flight_req_) return true;
  in_flight_ = false;
  if (resp->reading.status != truetime::OracleReading::Status::Ok) {
    on_failure();
    return true;
  }
  on_reading(resp->reading, in_flight_sent_);
  return true;
}

void TimestampSource::on_reading(const truetime::OracleReading& r, Nanos sent_local) {
  Nanos now = env_.local_now();
  observed_rtt_ = now - sent_local;
  TimestampBatch b = TimestampBatch::build(r.time, cfg_.ttl, cfg_.step, sent_local, env_.self());
  if (last_issued_) b.skip_through(*last_issued_);
  stats_.max_capacity = std::max<std::uint64_t>(stats_.max_capacity, b.capacity());
  if (!b.live_at(now, cfg_.max_drift) || b.issued() >= b.capacity()) {
    ++stats_.expired_on_arrival;
    if (!waiters_.empty()) on_failure();
    return;
  }
  batch_ = b;
  attempts_ = 0;
  drain_waiters();
}

void TimestampSource::drain_waiters() {
  while (!waiters_.empty()) {
    auto g = try_issue();
    if (!g) break;
    Callback cb = std::move(waiters_.front());
    waiters_.pop_front();
    cb(*g);
  }
  if (!waiters_.empty()) {
    if (!in_flight_) fetch();
  } else {
    maybe_prefetch();
  }
}

void TimestampSource::on_failure() {
  ++stats_.failures;
  if (waiters_.empty()) return;
  if (++attempts_ >= kMaxAttempts) {
    attempts_ = 0;
    auto failed = std::move(waiters_);
    waiters_.clear();
    for (auto& cb : failed) cb(std::nullopt);
    return;
  }
  env_.after(kRetryBackoff, [this, gen = generation_] {
    if (gen != generation_ || in_flight_) return;
    if (!waiters_.empty()) drain_waiters();
  });
}

void TimestampSource::strawman_request(Callback cb, int attempt) {
  ++stats_.oracle_calls;
  simnet::ReqId req = next_req_++;
  strawman_[req] = StrawmanCall{std::move(cb), env_.local_now(), attempt};
  env_.send(oracle_, simnet::OracleReq{req});
  env_.after(timeout_, [this, req, gen = generation_] {
    if (gen != generation_) return;
    auto it = strawman_.find(req);
    if (it == strawman_.end()) return;
    StrawmanCall call = std::move(it->second);
    strawman_.erase(it);
    ++stats_.failures;
    if (call.attempt + 1 >= kMaxAttempts)
      call.cb(std::nullopt);
    else
      strawman_request(std::move(call.cb), call.attempt + 1);
  });
}

}  // namespace ttkv::tsbatch
