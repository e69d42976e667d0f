#pragma once

#include <memory>
#include <vector>

#include "ttkv/harness/scenario.hpp"
#include "ttkv/harness/workload.hpp"
#include "ttkv/simnet/runtime.hpp"

namespace ttkv::mvto {
class DataNode;
}
namespace ttkv::txn {
class CoordinatorNode;
class RecorderNode;
}  // namespace ttkv::txn
namespace ttkv::replication {
class ReplicaNode;
class ReaderNode;
}  // namespace ttkv::replication
namespace ttkv::truetime {
class OracleNode;
}

namespace ttkv::harness {

struct RunSummary {
  Nanos finished_at = 0;
  std::uint64_t events = 0;
  bool completed = false;
  std::uint64_t committed = 0;
  std::uint64_t aborted = 0;
};

/// Builds every node of a scenario on one runtime and drives it.
///
/// Names: oracle.<region>, data.<p>, rec.<p>.a / rec.<p>.b,
/// replica.<p>.<region>, coord.<region>.<i>, reader.<region>.
/// Partition p holds keys with key % P == p and lives in region p % R.
class Cluster {
 public:
  explicit Cluster(Scenario s);
  ~Cluster();

  /// Runs until the workload and replica reads are done (plus the drain
  /// period) or the scenario's hard stop, whichever comes first.
  RunSummary run();

  /// Advances virtual time without checking for completion.
  void run_for(Nanos d);

  bool workload_done() const;

  simnet::Runtime& runtime() { return *rt_; }
  const Scenario& scenario() const { return scenario_; }
  trace::Trace& trace() { return rt_->trace_log(); }
  const WorkloadGenerator& generator() const { return *gen_; }

  const std::vector<mvto::DataNode*>& data_nodes() const { return data_; }
  const std::vector<txn::RecorderNode*>& recorders() const { return recorders_; }
  const std::vector<txn::CoordinatorNode*>& coordinators() const { return coords_; }
  const std::vector<replication::ReplicaNode*>& replicas() const { return replicas_; }
  const std::vector<replication::ReaderNode*>& readers() const { return readers_; }
  const std::vector<truetime::OracleNode*>& oracles() const { return oracles_; }

 private:
  truetime::DriftClock clock_for(const std::string& name, std::size_t index);
  void schedule_faults();

  Scenario scenario_;
  std::unique_ptr<simnet::Runtime> rt_;
  std::unique_ptr<WorkloadGenerator> gen_;
  std::mt19937_64 rng_;
  std::vector<mvto::DataNode*> data_;
  std::vector<txn::RecorderNode*> recorders_;
  std::vector<txn::CoordinatorNode*> coords_;
  std::vector<replication::ReplicaNode*> replicas_;
  std::vector<replication::ReaderNode*> readers_;
  std::vector<truetime::OracleNode*> oracles_;
  Nanos last_fault_ = 0;
  bool started_ = false;
};

}  // namespace ttkv::harness
