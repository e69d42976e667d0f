#pragma once

#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ttkv/epoch/cutter.hpp"
#include "ttkv/mvto/partition_store.hpp"
#include "ttkv/protocol.hpp"
#include "ttkv/replication/shipper.hpp"
#include "ttkv/simnet/rpc.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

namespace ttkv::mvto {

struct DataNodeStats {
  std::uint64_t reads = 0;
  std::uint64_t suspended_reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t write_aborts = 0;
  std::uint64_t pushes = 0;
  std::uint64_t recoveries = 0;
};

/// Primary of one partition: serves READ/WRITE/FINALIZE, resolves blocking
/// intents by pushing their recorders, cuts epochs into its log and ships the
/// log to replicas. Everything in memory is rebuilt from the log on restart.
class DataNode : public simnet::Node {
 public:
  DataNode(std::string name, PartitionId partition, ProtocolConfig cfg, NodeId oracle);

  void on_start() override;
  void on_message(NodeId src, const simnet::Message& m) override;
  void on_crash() override;
  void on_restart() override;

  PartitionId partition() const { return partition_; }
  const PartitionStore& store() const { return store_; }
  Epoch current_epoch() const { return cutter_ ? cutter_->current() : 0; }
  bool serving() const { return serving_; }
  const DataNodeStats& stats() const { return stats_; }
  const tsbatch::TimestampSource* timestamps() const { return ts_.get(); }

 private:
  struct PendingRead {
    NodeId src;
    simnet::ReqId req;
    TxnId txn;
    Timestamp ts;
    Key key;
    std::set<TxnId> waiting;
  };

  void boot(bool recovering);
  void on_read(NodeId src, const simnet::ReadReq& r);
  void on_write(NodeId src, const simnet::WriteReq& w);
  void on_finalize(NodeId src, const simnet::FinalizeReq& f);
  void on_push_result(const simnet::PushResp& r);

  void reply(NodeId src, simnet::ReqId req, simnet::Message m);
  bool duplicate(NodeId src, simnet::ReqId req);
  void block_on(std::uint64_t read_id, const std::vector<Blocker>& blockers);
  void push(const Blocker& b);
  void apply_decision(const TxnId& txn, Decision d, Epoch epoch, std::function<void()> on_durable);
  void resume(const TxnId& txn);
  void register_txn(const TxnId& txn);
  NodeId recorder_of(PartitionId p);
  void log(replication::LogEntry e, std::function<void()> on_durable = nullptr);

  PartitionId partition_;
  ProtocolConfig cfg_;
  NodeId oracle_;
  std::uint64_t generation_ = 0;
  bool serving_ = false;

  PartitionStore store_;
  std::unique_ptr<tsbatch::TimestampSource> ts_;
  std::unique_ptr<epoch::EpochCutter> cutter_;
  std::unique_ptr<simnet::RpcClient> rpc_;
  std::unique_ptr<replication::Shipper> shipper_;

  std::map<std::pair<NodeId, simnet::ReqId>, std::optional<simnet::Message>> replies_;
  std::map<std::uint64_t, PendingRead> pending_;
  std::unordered_map<TxnId, std::vector<std::uint64_t>> waiters_;
  std::unordered_set<TxnId> pushing_;
  std::unordered_set<TxnId> registered_;
  std::uint64_t next_read_ = 0;
  DataNodeStats stats_;
};

}  // namespace ttkv::mvto
