#pragma once

#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

#include "ttkv/epoch/cutter.hpp"
#include "ttkv/protocol.hpp"
#include "ttkv/simnet/runtime.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

namespace ttkv::txn {

enum class RecordStatus { InProgress, Deciding, Committed, Aborted };

struct TxnRecord {
  RecordStatus status = RecordStatus::InProgress;
  Epoch commit_epoch = 0;
  Nanos last_seen_local = 0;
  bool persisted = false;
  std::vector<std::pair<NodeId, simnet::ReqId>> pending_pushes;
  std::vector<std::pair<NodeId, simnet::ReqId>> pending_decides;
};

enum class RecorderRole { Active, Standby };

struct RecorderStats {
  std::uint64_t decisions = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t takeovers = 0;
  std::uint64_t retirements = 0;
};

/// Transaction recorder for the transactions whose first write landed on one
/// partition. One node per role is active (owner of the role's storage
/// stream); a standby in the same region pings it and takes over through a
/// membership compare-and-swap when it stops answering. Only decisions and
/// registrations are persisted.
class RecorderNode : public simnet::Node {
 public:
  RecorderNode(std::string name, PartitionId partition, bool initially_active, ProtocolConfig cfg, NodeId oracle);

  void on_start() override;
  void on_message(NodeId src, const simnet::Message& m) override;
  void on_crash() override;
  void on_restart() override;

  RecorderRole role() const { return role_; }
  Epoch current_epoch() const { return cutter_ ? cutter_->current() : 0; }
  const RecorderStats& stats() const { return stats_; }
  const TxnRecord* record(const TxnId& t) const;

 private:
  void boot(bool restarted);
  bool still_owner();
  void become_active();
  void become_standby();
  void ping_tick(std::uint64_t gen);
  void timeout_tick(std::uint64_t gen);

  TxnRecord& ensure(const TxnId& t);
  void decide(const TxnId& t, Decision d, const std::vector<Epoch>& proposed);
  void answer(const TxnId& t);
  void persist_registration(const TxnId& t, NodeId src, simnet::ReqId req);

  void on_push(NodeId src, const simnet::PushReq& p);
  void on_decide(NodeId src, const simnet::DecideReq& d);
  void on_register(NodeId src, const simnet::RegisterReq& r);
  void on_heartbeat(const simnet::Heartbeat& h);

  PartitionId partition_;
  bool initially_active_;
  ProtocolConfig cfg_;
  NodeId oracle_;
  RecorderRole role_ = RecorderRole::Standby;
  std::uint64_t generation_ = 0;
  std::uint64_t role_gen_ = 0;

  std::unique_ptr<tsbatch::TimestampSource> ts_;
  std::unique_ptr<epoch::EpochCutter> cutter_;

  std::unordered_map<TxnId, TxnRecord> records_;
  std::set<TxnId> undecided_;
  std::unordered_map<NodeId, std::uint32_t> incarnations_;

  std::uint64_t ping_seq_ = 0;
  Nanos last_pong_local_ = 0;
  RecorderStats stats_;
};

}  // namespace ttkv::txn
