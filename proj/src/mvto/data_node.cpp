#include "ttkv/mvto/data_node.hpp"

namespace ttkv::mvto {

DataNode::DataNode(std::string name, PartitionId partition, ProtocolConfig cfg, NodeId oracle)
    : Node(std::move(name)), partition_(partition), cfg_(cfg), oracle_(oracle) {}

void DataNode::on_start() { boot(false); }

void DataNode::on_restart() { boot(true); }

void DataNode::on_crash() {
  serving_ = false;
  store_ = PartitionStore{};
  if (cutter_) cutter_->stop();
  if (shipper_) shipper_->stop();
  if (rpc_) rpc_->reset();
  if (ts_) ts_->reset();
  replies_.clear();
  pending_.clear();
  waiters_.clear();
  pushing_.clear();
  registered_.clear();
}

void DataNode::boot(bool recovering) {
  const auto& dir = env().directory();
  auto& storage = env().storage();
  const auto stream = dir.data_streams[partition_];
  ts_ = std::make_unique<tsbatch::TimestampSource>(env(), cfg_.ts, oracle_);
  rpc_ = std::make_unique<simnet::RpcClient>(env(), cfg_.rpc_timeout, cfg_.rpc_sweep);
  cutter_ = std::make_unique<epoch::EpochCutter>(env(), *ts_, cfg_.epochs, cfg_.max_drift(), [this](Epoch n) {
    log(replication::EpochCutEntry{n});
    env().trace(trace::EpochCut{name(), n});
  });
  shipper_ = std::make_unique<replication::Shipper>(
      env(), partition_, stream, dir.replicas[partition_],
      replication::ShipperConfig{cfg_.ship_interval, cfg_.ship_window, cfg_.ship_rto});

  auto m = storage.membership(stream);
  auto gen = storage.compare_and_swap(stream, m.generation, id());
  if (!gen) throw std::logic_error("data role CAS lost without a competitor");
  generation_ = *gen;

  if (!recovering) {
    serving_ = true;
    cutter_->start(1, false);
    shipper_->start(false);
    return;
  }

  ++stats_.recoveries;
  Epoch last_cut = 0;
  for (const auto& e : storage.entries(stream)) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, replication::IntentEntry>) {
            store_.apply_intent(v.key, v.intent);
          } else if constexpr (std::is_same_v<T, replication::FinalizeEntry>) {
            store_.finalize(v.txn, v.decision, v.epoch);
          } else if constexpr (std::is_same_v<T, replication::EpochCutEntry>) {
            last_cut = v.epoch;
          }
        },
        e);
  }
  shipper_->start(true);
  // Reads served before the crash are forgotten; a fresh timestamp plus one
  // commit-wait span bounds every timestamp issued before it.
  ts_->acquire([this, last_cut](std::optional<tsbatch::TsGrant> g) {
    if (!g) {
      // Oracle unavailable: retry the whole recovery later.
      env().after(cfg_.rpc_timeout, [this] {
        on_crash();
        boot(true);
      });
      return;
    }
    store_.set_read_floor(Timestamp{g->ts.nanos + 2 * (cfg_.ts.ttl + cfg_.ts.epsilon), 0, 0});
    serving_ = true;
    cutter_->start(last_cut + 1, true);
    std::set<TxnId> undecided;
    for (const auto& e : env().storage().entries(env().directory().data_streams[partition_])) {
      if (const auto* ie = std::get_if<replication::IntentEntry>(&e)) {
        if (ie->intent.recorder == partition_ && !store_.fate(ie->intent.txn)) undecided.insert(ie->intent.txn);
      }
    }
    for (const TxnId& t : undecided) register_txn(t);
  });
}

NodeId DataNode::recorder_of(PartitionId p) {
  return env().storage().membership(env().directory().recorder_streams[p]).owner;
}

void DataNode::log(replication::LogEntry e, std::function<void()> on_durable) {
  auto r = env().append(env().directory().data_streams[partition_], generation_, std::move(e), std::move(on_durable));
  if (std::holds_alternative<replication::Fenced>(r)) {
    // Another incarnation owns the partition; stop acting as primary.
    serving_ = false;
  }
}

void DataNode::on_message(NodeId src, const simnet::Message& m) {
  if (ts_ && ts_->handle(m)) return;
  if (rpc_ && rpc_->handle(m)) return;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, simnet::ShipAck>) {
          shipper_->on_ack(src, v);
        } else if constexpr (std::is_same_v<T, simnet::ReadReq>) {
          if (serving_) on_read(src, v);
        } else if constexpr (std::is_same_v<T, simnet::WriteReq>) {
          if (serving_) on_write(src, v);
        } else if constexpr (std::is_same_v<T, simnet::FinalizeReq>) {
          if (serving_) on_finalize(src, v);
        }
      },
      m);
}

bool DataNode::duplicate(NodeId src, simnet::ReqId req) {
  auto [it, fresh] = replies_.try_emplace({src, req});
  if (fresh) return false;
  if (it->second) env().send(src, *it->second);
  return true;
}

void DataNode::reply(NodeId src, simnet::ReqId req, simnet::Message m) {
  replies_[{src, req}] = m;
  env().send(src, std::move(m));
}

void DataNode::on_read(NodeId src, const simnet::ReadReq& r) {
  if (duplicate(src, r.req)) return;
  ++stats_.reads;
  ReadEval ev = store_.read(r.key, r.ts, r.txn);
  if (ev.ready) {
    reply(src, r.req, simnet::ReadResp{r.req, ev.result.value, ev.result.version_ts, ev.result.writer});
    return;
  }
  ++stats_.suspended_reads;
  std::uint64_t id = next_read_++;
  pending_[id] = PendingRead{src, r.req, r.txn, r.ts, r.key, {}};
  block_on(id, ev.blockers);
}

void DataNode::block_on(std::uint64_t read_id, const std::vector<Blocker>& blockers) {
  PendingRead& pr = pending_.at(read_id);
  for (const Blocker& b : blockers) {
    if (!pr.waiting.insert(b.txn).second) continue;
    waiters_[b.txn].push_back(read_id);
    env().trace(trace::WaitEdge{pr.txn.to_string(), b.txn});
    push(b);
  }
}

void DataNode::push(const Blocker& b) {
  if (!pushing_.insert(b.txn).second) return;
  ++stats_.pushes;
  PartitionId rec = b.recorder;
  rpc_->call([this, rec] { return recorder_of(rec); }, simnet::PushReq{0, b.txn},
             [this](const simnet::Message& m) { on_push_result(std::get<simnet::PushResp>(m)); });
}

void DataNode::on_push_result(const simnet::PushResp& r) {
  pushing_.erase(r.txn);
  apply_decision(r.txn, r.decision, r.epoch, nullptr);
}

void DataNode::apply_decision(const TxnId& txn, Decision d, Epoch epoch, std::function<void()> on_durable) {
  FinalizeOutcome out = store_.finalize(txn, d, epoch);
  if (out.status != FinalizeStatus::Duplicate) {
    log(replication::FinalizeEntry{txn, d, epoch}, std::move(on_durable));
  } else if (on_durable) {
    env().sync(std::move(on_durable));
  }
  resume(txn);
}

void DataNode::resume(const TxnId& txn) {
  auto it = waiters_.find(txn);
  if (it == waiters_.end()) return;
  std::vector<std::uint64_t> ids = std::move(it->second);
  waiters_.erase(it);
  for (std::uint64_t id : ids) {
    auto pit = pending_.find(id);
    if (pit == pending_.end()) continue;
    PendingRead& pr = pit->second;
    pr.waiting.erase(txn);
    if (!pr.waiting.empty()) continue;
    ReadEval ev = store_.evaluate(pr.key, pr.ts, pr.txn);
    if (ev.ready) {
      reply(pr.src, pr.req, simnet::ReadResp{pr.req, ev.result.value, ev.result.version_ts, ev.result.writer});
      pending_.erase(pit);
    } else {
      block_on(id, ev.blockers);
    }
  }
}

void DataNode::on_write(NodeId src, const simnet::WriteReq& w) {
  if (duplicate(src, w.req)) return;
  ++stats_.writes;
  const Epoch epoch = cutter_->current();
  WriteOutcome out = store_.write(w.key, w.txn, w.ts, w.value, w.recorder, epoch);
  if (std::holds_alternative<AbortRequired>(out)) {
    ++stats_.write_aborts;
    reply(src, w.req, simnet::WriteResp{w.req, false, 0});
    return;
  }
  const WriteAck ack = std::get<WriteAck>(out);
  auto respond = [this, src, req = w.req, e = ack.proposed_epoch] { reply(src, req, simnet::WriteResp{req, true, e}); };
  if (ack.duplicate) {
    env().sync(respond);
    return;
  }
  WriteIntent intent{w.txn, w.ts, w.value, w.recorder, ack.proposed_epoch};
  log(replication::IntentEntry{w.key, std::move(intent)}, respond);
  if (w.recorder == partition_) register_txn(w.txn);
}

void DataNode::register_txn(const TxnId& txn) {
  if (!registered_.insert(txn).second) return;
  rpc_->call([this] { return recorder_of(partition_); }, simnet::RegisterReq{0, txn}, [](const simnet::Message&) {});
}

void DataNode::on_finalize(NodeId src, const simnet::FinalizeReq& f) {
  if (duplicate(src, f.req)) return;
  apply_decision(f.txn, f.decision, f.epoch, [this, src, req = f.req] { reply(src, req, simnet::FinalizeResp{req}); });
}

}  // namespace ttkv::mvto
