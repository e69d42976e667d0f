#pragma once

#include <map>
#include <memory>
#include <random>

#include "ttkv/harness/workload.hpp"
#include "ttkv/protocol.hpp"
#include "ttkv/simnet/rpc.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

namespace ttkv::replication {

struct ReaderConfig {
  /// Total reads issued by this reader.
  std::uint64_t reads = 0;
  std::uint32_t keys_per_read = 3;
  std::uint32_t concurrency = 4;
  /// Pause between two reads of the same slot.
  Nanos think = 5_ms;
  /// Probability that one key of a read is a slow-transaction key.
  double slow_key_prob = 0.0;
};

/// Issues multi-key snapshot reads against the replicas its region is routed
/// to. A read's view is the ceiling epoch of a fresh timestamp.
class ReaderNode : public simnet::Node {
 public:
  ReaderNode(std::string name, ReaderConfig cfg, ProtocolConfig proto, NodeId oracle, harness::KeySampler keys,
             std::vector<Key> slow_keys);

  void on_start() override;
  void on_message(NodeId src, const simnet::Message& m) override;
  void on_crash() override;

  bool idle() const { return issued_ >= cfg_.reads && inflight_.empty(); }
  std::uint64_t completed() const { return completed_; }

 private:
  struct Inflight {
    Timestamp ts_read;
    Epoch view = 0;
    std::vector<Key> keys;
    std::map<Key, trace::KeyRead> got;
    std::size_t outstanding = 0;
    std::size_t slot = 0;
  };

  void next(std::size_t slot);
  void issue(std::size_t slot, const tsbatch::TsGrant& g);
  std::vector<Key> pick_keys();

  ReaderConfig cfg_;
  ProtocolConfig proto_;
  NodeId oracle_;
  harness::KeySampler keys_;
  std::vector<Key> slow_keys_;
  std::uint64_t gen_ = 0;
  std::uint64_t issued_ = 0;
  std::uint64_t completed_ = 0;
  std::uint64_t counter_ = 0;
  std::unique_ptr<tsbatch::TimestampSource> ts_;
  std::unique_ptr<simnet::RpcClient> rpc_;
  std::map<std::uint64_t, Inflight> inflight_;
};

}  // namespace ttkv::replication
