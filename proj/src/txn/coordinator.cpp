#include "ttkv/txn/coordinator.hpp"

#include <random>

namespace ttkv::txn {

namespace {
constexpr Nanos kOracleBackoff = 10_ms;
}

CoordinatorNode::CoordinatorNode(std::string name, std::size_t clients, ProtocolConfig cfg, NodeId oracle,
                                 ProgramSource source)
    : Node(std::move(name)), clients_(clients), cfg_(cfg), oracle_(oracle), source_(std::move(source)) {}

void CoordinatorNode::on_start() { boot(); }

void CoordinatorNode::on_restart() {
  ++incarnation_;
  boot();
}

void CoordinatorNode::on_crash() {
  ++gen_;
  txns_.clear();
  busy_clients_ = 0;
  if (rpc_) rpc_->reset();
  if (ts_) ts_->reset();
}

void CoordinatorNode::boot() {
  ++gen_;
  ts_ = std::make_unique<tsbatch::TimestampSource>(env(), cfg_.ts, oracle_);
  rpc_ = std::make_unique<simnet::RpcClient>(env(), cfg_.rpc_timeout, cfg_.rpc_sweep);
  seq_ = 0;
  busy_clients_ = 0;
  std::uniform_int_distribution<Nanos> stagger(0, 10_ms);
  for (std::size_t c = 0; c < clients_; ++c) {
    ++busy_clients_;
    env().after(stagger(env().rng()), [this, c, g = gen_] {
      if (g == gen_) start_next(c);
    });
  }
  env().after(cfg_.heartbeat_interval, [this, g = gen_] { heartbeat_tick(g); });
}

NodeId CoordinatorNode::recorder_of(PartitionId p) {
  return env().storage().membership(env().directory().recorder_streams[p]).owner;
}

TxnHandle* CoordinatorNode::find(std::uint64_t seq) {
  auto it = txns_.find(seq);
  return it == txns_.end() ? nullptr : &it->second;
}

void CoordinatorNode::start_next(std::size_t client) {
  std::optional<harness::TxnProgram> program = source_();
  if (!program) {
    drained_ = true;
    --busy_clients_;
    return;
  }
  const std::uint64_t seq = ++seq_;
  TxnHandle& t = txns_[seq];
  t.id = TxnId{id(), incarnation_, seq};
  t.program = std::move(*program);
  t.client = client;
  ++stats_.started;
  env().trace(trace::TxnBegin{t.id, t.program.tag});
  ts_->acquire([this, seq, g = gen_](std::optional<tsbatch::TsGrant> grant) {
    if (g != gen_) return;
    TxnHandle* t = find(seq);
    if (!t) return;
    if (!grant) {
      ++stats_.aborted;
      env().trace(trace::TxnAborted{t->id, "oracle_unavailable"});
      std::size_t client = t->client;
      txns_.erase(seq);
      env().after(kOracleBackoff, [this, client, g] {
        if (g == gen_) start_next(client);
      });
      return;
    }
    t->grant = grant;
    env().trace(trace::TsAssigned{t->id, grant->ts});
    step(seq);
  });
}

void CoordinatorNode::step(std::uint64_t seq) {
  TxnHandle* t = find(seq);
  if (!t || t->status != TxnStatus::Executing) return;
  if (t->next_op == t->program.ops.size()) {
    t->status = TxnStatus::Committing;
    commit(seq);
    return;
  }
  const harness::Op op = t->program.ops[t->next_op];
  switch (op.kind) {
    case harness::OpKind::Read:
      do_read(*t, op);
      break;
    case harness::OpKind::Write:
      do_write(*t, op);
      break;
    case harness::OpKind::Think:
      ++t->next_op;
      env().after(op.think, [this, seq, g = gen_] {
        if (g == gen_) step(seq);
      });
      break;
  }
}

void CoordinatorNode::do_read(TxnHandle& t, const harness::Op& op) {
  const auto& dir = env().directory();
  const PartitionId p = dir.partition_of(op.key);
  const std::uint64_t seq = t.id.seq;
  rpc_->call(dir.data_nodes[p], simnet::ReadReq{0, t.id, t.grant->ts, op.key},
             [this, seq, p, key = op.key](const simnet::Message& m) {
               TxnHandle* t = find(seq);
               if (!t || t->status != TxnStatus::Executing) return;
               const auto& r = std::get<simnet::ReadResp>(m);
               env().trace(trace::ReadDone{t->id, static_cast<std::uint32_t>(t->next_op), key, p, r.version, r.writer});
               ++t->next_op;
               step(seq);
             });
}

void CoordinatorNode::do_write(TxnHandle& t, const harness::Op& op) {
  const auto& dir = env().directory();
  const PartitionId p = dir.partition_of(op.key);
  if (!t.recorder) t.recorder = p;
  t.touched.insert(p);
  const std::uint64_t seq = t.id.seq;
  Value value = t.id.to_string() + "#" + std::to_string(t.next_op);
  rpc_->call(dir.data_nodes[p], simnet::WriteReq{0, t.id, t.grant->ts, op.key, std::move(value), *t.recorder},
             [this, seq, p, key = op.key](const simnet::Message& m) {
               TxnHandle* t = find(seq);
               if (!t || t->status != TxnStatus::Executing) return;
               const auto& r = std::get<simnet::WriteResp>(m);
               if (!r.ok) {
                 abort(*t, "read_tracker");
                 return;
               }
               env().trace(trace::WriteDone{t->id, static_cast<std::uint32_t>(t->next_op), key, p, r.epoch});
               t->proposed_epochs.push_back(r.epoch);
               ++t->next_op;
               step(seq);
             });
}

void CoordinatorNode::commit(std::uint64_t seq) {
  TxnHandle* t = find(seq);
  if (!t) return;
  Nanos wait = t->grant->cwt.remaining(env().local_now());
  if (wait > 0) {
    env().after(wait, [this, seq, g = gen_] {
      if (g == gen_) commit(seq);
    });
    return;
  }
  if (!t->recorder) {
    ++stats_.read_only;
    ++stats_.committed;
    t->status = TxnStatus::Committed;
    env().trace(trace::TxnCommitted{t->id, std::nullopt});
    finish(seq);
    return;
  }
  env().trace(trace::CommitRequested{t->id});
  PartitionId rec = *t->recorder;
  rpc_->call([this, rec] { return recorder_of(rec); }, simnet::DecideReq{0, t->id, Decision::Commit, t->proposed_epochs},
             [this, seq](const simnet::Message& m) {
               TxnHandle* t = find(seq);
               if (!t) return;
               const auto& r = std::get<simnet::DecideResp>(m);
               if (r.decision == Decision::Commit) {
                 ++stats_.committed;
                 t->status = TxnStatus::Committed;
                 env().trace(trace::TxnCommitted{t->id, r.epoch});
               } else {
                 ++stats_.aborted;
                 t->status = TxnStatus::Aborted;
                 env().trace(trace::TxnAborted{t->id, "recorder"});
               }
               finalize_all(*t, r.decision, r.epoch);
               finish(seq);
             });
}

void CoordinatorNode::abort(TxnHandle& t, const std::string& reason) {
  ++stats_.aborted;
  t.status = TxnStatus::Aborted;
  env().trace(trace::TxnAborted{t.id, reason});
  if (t.recorder) {
    PartitionId rec = *t.recorder;
    rpc_->call([this, rec] { return recorder_of(rec); }, simnet::DecideReq{0, t.id, Decision::Abort, {}},
               [](const simnet::Message&) {});
  }
  finalize_all(t, Decision::Abort, 0);
  finish(t.id.seq);
}

void CoordinatorNode::finalize_all(const TxnHandle& t, Decision d, Epoch epoch) {
  const auto& dir = env().directory();
  for (PartitionId p : t.touched)
    rpc_->call(dir.data_nodes[p], simnet::FinalizeReq{0, t.id, d, epoch}, [](const simnet::Message&) {});
}

void CoordinatorNode::finish(std::uint64_t seq) {
  auto it = txns_.find(seq);
  if (it == txns_.end()) return;
  std::size_t client = it->second.client;
  txns_.erase(it);
  start_next(client);
}

void CoordinatorNode::heartbeat_tick(std::uint64_t gen) {
  if (gen != gen_) return;
  std::map<PartitionId, std::vector<TxnId>> by_recorder;
  for (const auto& [seq, t] : txns_)
    if (t.recorder && (t.status == TxnStatus::Executing || t.status == TxnStatus::Committing))
      by_recorder[*t.recorder].push_back(t.id);
  for (auto& [p, ids] : by_recorder) {
    NodeId dst = recorder_of(p);
    if (dst != kNoNode) env().send(dst, simnet::Heartbeat{id(), incarnation_, std::move(ids)});
  }
  env().after(cfg_.heartbeat_interval, [this, gen] { heartbeat_tick(gen); });
}

void CoordinatorNode::on_message(NodeId, const simnet::Message& m) {
  if (ts_ && ts_->handle(m)) return;
  if (rpc_) rpc_->handle(m);
}

}  // namespace ttkv::txn
