#include "ttkv/txn/recorder.hpp"

namespace ttkv::txn {

RecorderNode::RecorderNode(std::string name, PartitionId partition, bool initially_active, ProtocolConfig cfg,
                           NodeId oracle)
    : Node(std::move(name)), partition_(partition), initially_active_(initially_active), cfg_(cfg), oracle_(oracle) {}

const TxnRecord* RecorderNode::record(const TxnId& t) const {
  auto it = records_.find(t);
  return it == records_.end() ? nullptr : &it->second;
}

void RecorderNode::on_start() { boot(false); }
void RecorderNode::on_restart() { boot(true); }

void RecorderNode::on_crash() {
  if (cutter_) cutter_->stop();
  if (ts_) ts_->reset();
  records_.clear();
  undecided_.clear();
  incarnations_.clear();
  role_ = RecorderRole::Standby;
  ++role_gen_;
}

void RecorderNode::boot(bool restarted) {
  ts_ = std::make_unique<tsbatch::TimestampSource>(env(), cfg_.ts, oracle_);
  cutter_ = std::make_unique<epoch::EpochCutter>(env(), *ts_, cfg_.epochs, cfg_.max_drift(),
                                                 [this](Epoch n) { env().trace(trace::EpochCut{name(), n}); });
  cutter_->start(1, restarted);
  auto stream = env().directory().recorder_streams[partition_];
  if (!restarted && initially_active_) {
    auto gen = env().storage().compare_and_swap(stream, env().storage().membership(stream).generation, id());
    if (gen) {
      generation_ = *gen;
      become_active();
      return;
    }
  }
  role_ = RecorderRole::Standby;
  become_standby();
}

bool RecorderNode::still_owner() {
  auto stream = env().directory().recorder_streams[partition_];
  return role_ == RecorderRole::Active && env().storage().membership(stream).generation == generation_;
}

void RecorderNode::become_active() {
  role_ = RecorderRole::Active;
  ++role_gen_;
  records_.clear();
  undecided_.clear();
  const Nanos now = env().local_now();
  auto stream = env().directory().recorder_streams[partition_];
  for (const auto& e : env().storage().entries(stream)) {
    if (const auto* reg = std::get_if<replication::TxnRegisteredEntry>(&e)) {
      auto [it, fresh] = records_.try_emplace(reg->txn);
      if (fresh) {
        it->second.last_seen_local = now;
        undecided_.insert(reg->txn);
      }
      it->second.persisted = true;
    } else if (const auto* rec = std::get_if<replication::TxnRecordEntry>(&e)) {
      TxnRecord& r = records_[rec->txn];
      r.status = rec->decision == Decision::Commit ? RecordStatus::Committed : RecordStatus::Aborted;
      r.commit_epoch = rec->epoch;
      r.persisted = true;
      undecided_.erase(rec->txn);
    }
  }
  if (generation_ > 1) {
    ++stats_.takeovers;
    env().trace(trace::Takeover{name(), env().storage().name(stream), generation_});
  }
  env().after(cfg_.heartbeat_interval, [this, g = role_gen_] { timeout_tick(g); });
}

void RecorderNode::become_standby() {
  if (role_ == RecorderRole::Active) {
    ++stats_.retirements;
    env().trace(trace::Retired{name(), env().storage().name(env().directory().recorder_streams[partition_])});
  }
  role_ = RecorderRole::Standby;
  ++role_gen_;
  records_.clear();
  undecided_.clear();
  last_pong_local_ = env().local_now();
  ping_tick(role_gen_);
}

void RecorderNode::ping_tick(std::uint64_t gen) {
  if (gen != role_gen_) return;
  auto stream = env().directory().recorder_streams[partition_];
  auto& storage = env().storage();
  replication::Membership m = storage.membership(stream);
  if (env().local_now() - last_pong_local_ > cfg_.heartbeat_timeout) {
    if (auto g = storage.compare_and_swap(stream, m.generation, id())) {
      generation_ = *g;
      become_active();
      return;
    }
    last_pong_local_ = env().local_now();
  } else if (m.owner != kNoNode && m.owner != id()) {
    env().send(m.owner, simnet::RecorderPing{++ping_seq_});
  }
  env().after(cfg_.heartbeat_interval, [this, gen] { ping_tick(gen); });
}

void RecorderNode::timeout_tick(std::uint64_t gen) {
  if (gen != role_gen_) return;
  if (!still_owner()) {
    become_standby();
    return;
  }
  const Nanos now = env().local_now();
  std::vector<TxnId> expired;
  for (const TxnId& t : undecided_) {
    const TxnRecord& r = records_.at(t);
    if (r.status != RecordStatus::InProgress) continue;
    auto inc = incarnations_.find(t.coordinator);
    bool restarted = inc != incarnations_.end() && inc->second > t.incarnation;
    if (restarted || now - r.last_seen_local > cfg_.heartbeat_timeout) expired.push_back(t);
  }
  for (const TxnId& t : expired) {
    ++stats_.timeouts;
    decide(t, Decision::Abort, {});
    if (role_ != RecorderRole::Active) return;
  }
  env().after(cfg_.heartbeat_interval, [this, gen] { timeout_tick(gen); });
}

TxnRecord& RecorderNode::ensure(const TxnId& t) {
  auto [it, fresh] = records_.try_emplace(t);
  if (fresh) {
    it->second.last_seen_local = env().local_now();
    undecided_.insert(t);
  }
  return it->second;
}

void RecorderNode::decide(const TxnId& t, Decision d, const std::vector<Epoch>& proposed) {
  TxnRecord& r = ensure(t);
  if (r.status != RecordStatus::InProgress) return;
  Epoch epoch = d == Decision::Commit ? epoch::assign_commit_epoch(proposed, cutter_->current()) : 0;
  auto stream = env().directory().recorder_streams[partition_];
  auto res = env().append(stream, generation_, replication::TxnRecordEntry{t, d, epoch}, [this, t, d, epoch] {
    auto it = records_.find(t);
    if (it == records_.end() || it->second.status != RecordStatus::Deciding) return;
    it->second.status = d == Decision::Commit ? RecordStatus::Committed : RecordStatus::Aborted;
    it->second.commit_epoch = epoch;
    undecided_.erase(t);
    answer(t);
  });
  if (std::holds_alternative<replication::Fenced>(res)) {
    become_standby();
    return;
  }
  ++stats_.decisions;
  r.status = RecordStatus::Deciding;
  env().trace(trace::RecordDecided{t, name(), d == Decision::Commit, epoch});
}

void RecorderNode::answer(const TxnId& t) {
  TxnRecord& r = records_.at(t);
  Decision d = r.status == RecordStatus::Committed ? Decision::Commit : Decision::Abort;
  for (auto [src, req] : r.pending_pushes) env().send(src, simnet::PushResp{req, t, d, r.commit_epoch});
  for (auto [src, req] : r.pending_decides) env().send(src, simnet::DecideResp{req, t, d, r.commit_epoch});
  r.pending_pushes.clear();
  r.pending_decides.clear();
}

void RecorderNode::on_message(NodeId src, const simnet::Message& m) {
  if (ts_->handle(m)) return;
  if (const auto* pong = std::get_if<simnet::RecorderPong>(&m)) {
    (void)pong;
    if (role_ == RecorderRole::Standby) last_pong_local_ = env().local_now();
    return;
  }
  if (role_ != RecorderRole::Active) return;
  if (!still_owner()) {
    become_standby();
    return;
  }
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, simnet::RecorderPing>) {
          env().send(src, simnet::RecorderPong{v.seq});
        } else if constexpr (std::is_same_v<T, simnet::PushReq>) {
          on_push(src, v);
        } else if constexpr (std::is_same_v<T, simnet::DecideReq>) {
          on_decide(src, v);
        } else if constexpr (std::is_same_v<T, simnet::RegisterReq>) {
          on_register(src, v);
        } else if constexpr (std::is_same_v<T, simnet::Heartbeat>) {
          on_heartbeat(v);
        }
      },
      m);
}

void RecorderNode::on_push(NodeId src, const simnet::PushReq& p) {
  TxnRecord& r = ensure(p.txn);
  if (r.status == RecordStatus::Committed || r.status == RecordStatus::Aborted) {
    Decision d = r.status == RecordStatus::Committed ? Decision::Commit : Decision::Abort;
    env().send(src, simnet::PushResp{p.req, p.txn, d, r.commit_epoch});
    return;
  }
  r.pending_pushes.emplace_back(src, p.req);
}

void RecorderNode::on_decide(NodeId src, const simnet::DecideReq& d) {
  TxnRecord& r = ensure(d.txn);
  if (r.status == RecordStatus::Committed || r.status == RecordStatus::Aborted) {
    Decision out = r.status == RecordStatus::Committed ? Decision::Commit : Decision::Abort;
    env().send(src, simnet::DecideResp{d.req, d.txn, out, r.commit_epoch});
    return;
  }
  r.pending_decides.emplace_back(src, d.req);
  if (r.status == RecordStatus::InProgress) decide(d.txn, d.decision, d.proposed);
}

void RecorderNode::on_register(NodeId src, const simnet::RegisterReq& reg) {
  TxnRecord& r = ensure(reg.txn);
  auto respond = [this, src, req = reg.req] { env().send(src, simnet::RegisterResp{req}); };
  if (r.persisted || r.status != RecordStatus::InProgress) {
    env().sync(respond);
    return;
  }
  r.persisted = true;
  auto res = env().append(env().directory().recorder_streams[partition_], generation_,
                          replication::TxnRegisteredEntry{reg.txn}, respond);
  if (std::holds_alternative<replication::Fenced>(res)) become_standby();
}

void RecorderNode::on_heartbeat(const simnet::Heartbeat& h) {
  auto& inc = incarnations_[h.coordinator];
  inc = std::max(inc, h.incarnation);
  const Nanos now = env().local_now();
  for (const TxnId& t : h.active) {
    if (t.incarnation < inc) continue;
    TxnRecord& r = ensure(t);
    r.last_seen_local = now;
  }
}

}  // namespace ttkv::txn
