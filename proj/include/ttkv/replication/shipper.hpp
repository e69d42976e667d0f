#pragma once

#include <vector>

#include "ttkv/simnet/runtime.hpp"

namespace ttkv::replication {

struct ShipperConfig {
  Nanos interval = 1_ms;
  std::size_t window = 4096;
  Nanos rto = 250_ms;
};

/// Go-back-N log shipping from one primary stream to its replicas. Sends
/// whatever the stream holds beyond each replica's cursor on every tick. A
/// gap report, or an ack that stalls for `rto`, rewinds the cursor to the
/// last acknowledged position.
class Shipper {
 public:
  Shipper(simnet::Env& env, PartitionId partition, StreamId stream, std::vector<NodeId> replicas, ShipperConfig cfg);

  /// `probe`: positions are unknown (after a restart); learn them from acks.
  void start(bool probe);
  void stop() { ++generation_; }
  void on_ack(NodeId from, const simnet::ShipAck& ack);

  std::uint64_t acked(NodeId replica) const;

 private:
  struct Cursor {
    NodeId node = kNoNode;
    std::uint64_t next = 0;
    std::uint64_t acked = 0;
    Nanos progress_local = 0;
    bool probing = false;
    bool probe_sent = false;
  };

  void tick(std::uint64_t gen);

  simnet::Env& env_;
  PartitionId partition_;
  StreamId stream_;
  ShipperConfig cfg_;
  std::vector<Cursor> cursors_;
  std::uint64_t generation_ = 0;
};

}  // namespace ttkv::replication
