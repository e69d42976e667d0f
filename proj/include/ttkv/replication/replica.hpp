#pragma once

#include <map>
#include <memory>
#include <set>
#include <unordered_map>

#include "ttkv/mvto/partition_store.hpp"
#include "ttkv/protocol.hpp"
#include "ttkv/simnet/rpc.hpp"

namespace ttkv::replication {

struct ReplicaStats {
  std::uint64_t applied = 0;
  std::uint64_t gaps = 0;
  std::uint64_t reads = 0;
  std::uint64_t pushes = 0;
};

/// Read-only copy of one partition, materialized by replaying the primary's
/// log in order. Serves epoch-view reads once the view is fully replayed.
class ReplicaNode : public simnet::Node {
 public:
  ReplicaNode(std::string name, PartitionId partition, ProtocolConfig cfg);

  void on_start() override;
  void on_message(NodeId src, const simnet::Message& m) override;
  void on_crash() override;

  PartitionId partition() const { return partition_; }
  Epoch replayed_epoch() const { return replayed_; }
  std::uint64_t applied() const { return applied_; }
  const mvto::PartitionStore& store() const { return store_; }
  const ReplicaStats& stats() const { return stats_; }

 private:
  struct PendingRead {
    NodeId src;
    simnet::ReqId req;
    std::uint64_t read_id;
    Timestamp ts_read;
    Epoch view;
    std::vector<Key> keys;
    std::set<TxnId> waiting;
    std::uint32_t pushes = 0;
  };

  void on_ship(NodeId src, const simnet::ShipBatch& b);
  void apply_batch(const simnet::ShipBatch& b);
  void apply(const LogEntry& e);
  void on_read(NodeId src, const simnet::ReplicaReadReq& r);
  void evaluate(std::uint64_t id);
  void push(const mvto::Blocker& b);
  void resume(const TxnId& txn);
  std::optional<mvto::TxnFate> known(const TxnId& txn) const;

  PartitionId partition_;
  ProtocolConfig cfg_;
  mvto::PartitionStore store_;
  std::uint64_t applied_ = 0;
  Epoch replayed_ = 0;
  /// Batches that arrived ahead of a missing one, by start position, with
  /// their local arrival time.
  std::map<std::uint64_t, std::pair<simnet::ShipBatch, Nanos>> held_;

  std::unique_ptr<simnet::RpcClient> rpc_;
  std::unordered_map<TxnId, mvto::TxnFate> pushed_;
  std::set<TxnId> pushing_;
  std::map<std::uint64_t, PendingRead> pending_;
  std::multimap<Epoch, std::uint64_t> by_view_;
  std::unordered_map<TxnId, std::vector<std::uint64_t>> waiters_;
  std::map<std::pair<NodeId, simnet::ReqId>, std::optional<simnet::Message>> replies_;
  std::uint64_t next_ = 0;
  ReplicaStats stats_;
};

}  // namespace ttkv::replication
