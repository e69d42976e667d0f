#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "ttkv/harness/workload.hpp"
#include "ttkv/protocol.hpp"
#include "ttkv/simnet/rpc.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

namespace ttkv::txn {

enum class TxnStatus { Executing, Committing, Committed, Aborted };

struct TxnHandle {
  TxnId id;
  harness::TxnProgram program;
  std::size_t next_op = 0;
  std::optional<tsbatch::TsGrant> grant;
  std::optional<PartitionId> recorder;
  std::vector<Epoch> proposed_epochs;
  std::set<PartitionId> touched;
  TxnStatus status = TxnStatus::Executing;
  std::size_t client = 0;
};

struct CoordinatorStats {
  std::uint64_t started = 0;
  std::uint64_t committed = 0;
  std::uint64_t aborted = 0;
  std::uint64_t read_only = 0;
};

/// Runs closed-loop clients: each client executes one transaction program at
/// a time, multi-shot, against the partition primaries. Commit waits out the
/// residual commit wait, then takes a single round trip to the recorder;
/// finalization is sent afterwards without waiting.
class CoordinatorNode : public simnet::Node {
 public:
  using ProgramSource = std::function<std::optional<harness::TxnProgram>()>;

  CoordinatorNode(std::string name, std::size_t clients, ProtocolConfig cfg, NodeId oracle, ProgramSource source);

  void on_start() override;
  void on_message(NodeId src, const simnet::Message& m) override;
  void on_crash() override;
  void on_restart() override;

  /// No client has a transaction in flight and the program source is drained.
  bool idle() const { return busy_clients_ == 0 && drained_; }
  const CoordinatorStats& stats() const { return stats_; }
  const tsbatch::TimestampSource* timestamps() const { return ts_.get(); }
  std::uint32_t incarnation() const { return incarnation_; }

 private:
  void boot();
  void start_next(std::size_t client);
  void step(std::uint64_t seq);
  void do_read(TxnHandle& t, const harness::Op& op);
  void do_write(TxnHandle& t, const harness::Op& op);
  void commit(std::uint64_t seq);
  void abort(TxnHandle& t, const std::string& reason);
  void finish(std::uint64_t seq);
  void finalize_all(const TxnHandle& t, Decision d, Epoch epoch);
  void heartbeat_tick(std::uint64_t gen);
  NodeId recorder_of(PartitionId p);
  TxnHandle* find(std::uint64_t seq);

  std::size_t clients_;
  ProtocolConfig cfg_;
  NodeId oracle_;
  ProgramSource source_;
  std::uint32_t incarnation_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t gen_ = 0;
  std::size_t busy_clients_ = 0;
  bool drained_ = false;

  std::unique_ptr<tsbatch::TimestampSource> ts_;
  std::unique_ptr<simnet::RpcClient> rpc_;
  std::map<std::uint64_t, TxnHandle> txns_;
  CoordinatorStats stats_;
};

}  // namespace ttkv::txn
