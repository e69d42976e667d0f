#include "ttkv/replication/shipper.hpp"

#include <algorithm>

namespace ttkv::replication {

Shipper::Shipper(simnet::Env& env, PartitionId partition, StreamId stream, std::vector<NodeId> replicas,
                 ShipperConfig cfg)
    : env_(env), partition_(partition), stream_(stream), cfg_(cfg) {
  for (NodeId r : replicas) cursors_.push_back(Cursor{r});
}

void Shipper::start(bool probe) {
  ++generation_;
  if (cursors_.empty()) return;
  Nanos now = env_.local_now();
  for (Cursor& c : cursors_) {
    c.next = 0;
    c.acked = 0;
    c.progress_local = now;
    c.probing = probe;
    c.probe_sent = false;
  }
  env_.after(cfg_.interval, [this, gen = generation_] { tick(gen); });
}

void Shipper::tick(std::uint64_t gen) {
  if (gen != generation_) return;
  const auto& log = env_.storage().entries(stream_);
  const Nanos now = env_.local_now();
  for (Cursor& c : cursors_) {
    if (c.probing) {
      if (!c.probe_sent || now - c.progress_local >= cfg_.rto) {
        c.probe_sent = true;
        env_.send(c.node, simnet::ShipBatch{partition_, log.size(), {}});
        c.progress_local = now;
      }
      continue;
    }
    if (c.acked < c.next && now - c.progress_local >= cfg_.rto) {
      c.next = c.acked;
      c.progress_local = now;
    }
    std::uint64_t end = std::min<std::uint64_t>(log.size(), c.acked + cfg_.window);
    if (c.next < end) {
      simnet::ShipBatch b{partition_, c.next, {}};
      b.entries.assign(log.begin() + static_cast<std::ptrdiff_t>(c.next), log.begin() + static_cast<std::ptrdiff_t>(end));
      env_.send(c.node, std::move(b));
      if (c.acked == c.next) c.progress_local = now;
      c.next = end;
    }
  }
  env_.after(cfg_.interval, [this, gen] { tick(gen); });
}

void Shipper::on_ack(NodeId from, const simnet::ShipAck& ack) {
  for (Cursor& c : cursors_) {
    if (c.node != from) continue;
    if (c.probing) {
      c.probing = false;
      c.acked = c.next = ack.applied;
      c.progress_local = env_.local_now();
    } else {
      if (ack.applied > c.acked) {
        c.acked = ack.applied;
        c.next = std::max(c.next, c.acked);
        c.progress_local = env_.local_now();
      }
      // Go back to the first missing entry without waiting for the timeout.
      if (ack.gap && ack.applied == c.acked && c.next > c.acked) c.next = c.acked;
    }
  }
}

std::uint64_t Shipper::acked(NodeId replica) const {
  for (const Cursor& c : cursors_)
    if (c.node == replica) return c.acked;
  return 0;
}

}  // namespace ttkv::replication
