#include "ttkv/replication/replica.hpp"

namespace ttkv::replication {

namespace {
// Reordering shorter than this is absorbed; a hole older than it is reported.
constexpr Nanos kReorderWindow = 10_ms;
constexpr std::size_t kMaxHeld = 256;
}  // namespace

ReplicaNode::ReplicaNode(std::string name, PartitionId partition, ProtocolConfig cfg)
    : Node(std::move(name)), partition_(partition), cfg_(cfg) {}

void ReplicaNode::on_start() {
  rpc_ = std::make_unique<simnet::RpcClient>(env(), cfg_.rpc_timeout, cfg_.rpc_sweep);
}

void ReplicaNode::on_crash() {
  // Replica state is not durable; a restarted replica replays from position 0.
  store_ = mvto::PartitionStore{};
  applied_ = 0;
  replayed_ = 0;
  held_.clear();
  if (rpc_) rpc_->reset();
  pushed_.clear();
  pushing_.clear();
  pending_.clear();
  by_view_.clear();
  waiters_.clear();
  replies_.clear();
}

void ReplicaNode::on_message(NodeId src, const simnet::Message& m) {
  if (rpc_ && rpc_->handle(m)) return;
  if (const auto* b = std::get_if<simnet::ShipBatch>(&m)) {
    on_ship(src, *b);
  } else if (const auto* r = std::get_if<simnet::ReplicaReadReq>(&m)) {
    on_read(src, *r);
  }
}

void ReplicaNode::on_ship(NodeId src, const simnet::ShipBatch& b) {
  const Nanos now = env().local_now();
  if (b.from > applied_) {
    ++stats_.gaps;
    if (held_.size() < kMaxHeld) held_.try_emplace(b.from, b, now);
  } else {
    apply_batch(b);
    while (!held_.empty() && held_.begin()->first <= applied_) {
      apply_batch(held_.begin()->second.first);
      held_.erase(held_.begin());
    }
  }
  bool gap = !held_.empty() && now - held_.begin()->second.second >= kReorderWindow;
  env().send(src, simnet::ShipAck{partition_, applied_, gap});
}

void ReplicaNode::apply_batch(const simnet::ShipBatch& b) {
  for (std::uint64_t i = applied_ - b.from; i < b.entries.size(); ++i) {
    apply(b.entries[i]);
    ++applied_;
    ++stats_.applied;
  }
}

void ReplicaNode::apply(const LogEntry& e) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IntentEntry>) {
          store_.apply_intent(v.key, v.intent);
        } else if constexpr (std::is_same_v<T, FinalizeEntry>) {
          store_.finalize(v.txn, v.decision, v.epoch);
          resume(v.txn);
        } else if constexpr (std::is_same_v<T, EpochCutEntry>) {
          replayed_ = std::max(replayed_, v.epoch);
          env().trace(trace::ReplayedEpoch{name(), partition_, replayed_});
          while (!by_view_.empty() && by_view_.begin()->first <= replayed_) {
            std::uint64_t id = by_view_.begin()->second;
            by_view_.erase(by_view_.begin());
            env().trace(trace::ReplicaReqReady{pending_.at(id).read_id, name()});
            evaluate(id);
          }
        }
      },
      e);
}

void ReplicaNode::on_read(NodeId src, const simnet::ReplicaReadReq& r) {
  auto [it, fresh] = replies_.try_emplace({src, r.req});
  if (!fresh) {
    if (it->second) env().send(src, *it->second);
    return;
  }
  ++stats_.reads;
  env().trace(trace::ReplicaReqArrived{r.read_id, name()});
  std::uint64_t id = next_++;
  pending_[id] = PendingRead{src, r.req, r.read_id, r.ts_read, r.view, r.keys, {}, 0};
  if (replayed_ >= r.view) {
    env().trace(trace::ReplicaReqReady{r.read_id, name()});
    evaluate(id);
  } else {
    by_view_.emplace(r.view, id);
  }
}

std::optional<mvto::TxnFate> ReplicaNode::known(const TxnId& txn) const {
  auto it = pushed_.find(txn);
  if (it == pushed_.end()) return std::nullopt;
  return it->second;
}

void ReplicaNode::evaluate(std::uint64_t id) {
  PendingRead& pr = pending_.at(id);
  auto lookup = [this](const TxnId& t) { return known(t); };
  simnet::ReplicaReadResp resp{pr.req, {}};
  std::vector<mvto::Blocker> blockers;
  for (Key k : pr.keys) {
    mvto::ReadEval ev = store_.view_read(k, pr.ts_read, pr.view, lookup);
    if (!ev.ready) {
      blockers.insert(blockers.end(), ev.blockers.begin(), ev.blockers.end());
      continue;
    }
    resp.values.push_back(simnet::KeyValue{k, ev.result.value, ev.result.version_ts, ev.result.writer});
  }
  if (blockers.empty()) {
    env().trace(trace::ReplicaReqServed{pr.read_id, name(), pr.pushes});
    replies_[{pr.src, pr.req}] = resp;
    env().send(pr.src, std::move(resp));
    pending_.erase(id);
    return;
  }
  for (const mvto::Blocker& b : blockers) {
    if (!pr.waiting.insert(b.txn).second) continue;
    ++pr.pushes;
    waiters_[b.txn].push_back(id);
    env().trace(trace::WaitEdge{"rread:" + std::to_string(pr.read_id), b.txn});
    push(b);
  }
}

void ReplicaNode::push(const mvto::Blocker& b) {
  if (!pushing_.insert(b.txn).second) return;
  ++stats_.pushes;
  PartitionId rec = b.recorder;
  rpc_->call(
      [this, rec] { return env().storage().membership(env().directory().recorder_streams[rec]).owner; },
      simnet::PushReq{0, b.txn}, [this](const simnet::Message& m) {
        const auto& r = std::get<simnet::PushResp>(m);
        pushing_.erase(r.txn);
        pushed_[r.txn] = mvto::TxnFate{r.decision, r.decision == Decision::Commit ? r.epoch : 0};
        resume(r.txn);
      });
}

void ReplicaNode::resume(const TxnId& txn) {
  auto it = waiters_.find(txn);
  if (it == waiters_.end()) return;
  std::vector<std::uint64_t> ids = std::move(it->second);
  waiters_.erase(it);
  for (std::uint64_t id : ids) {
    auto pit = pending_.find(id);
    if (pit == pending_.end()) continue;
    pit->second.waiting.erase(txn);
    if (pit->second.waiting.empty()) evaluate(id);
  }
}

}  // namespace ttkv::replication
