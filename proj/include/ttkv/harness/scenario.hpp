#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttkv/harness/workload.hpp"
#include "ttkv/protocol.hpp"
#include "ttkv/replication/reader.hpp"
#include "ttkv/simnet/network.hpp"
#include "ttkv/truetime/oracle_node.hpp"

namespace ttkv::harness {

enum class DriftMode { Zero, Random, Adversarial };
enum class ReplicaPlacement { None, Other, All };

struct ClockSection {
  Nanos epsilon = 100_us;
  double max_drift = 200e-6;
  DriftMode drift_mode = DriftMode::Random;
  truetime::Placement oracle_placement = truetime::Placement::Random;
  /// node name -> drift (signed fraction), overriding drift_mode.
  std::map<std::string, double> overrides;
};

struct TopologySection {
  std::uint32_t partitions = 10;
  std::uint32_t coordinators_per_region = 1;
  std::uint32_t clients_per_coordinator = 8;
};

struct FaultSpec {
  enum class Kind { Crash, Pause, OracleOutage };
  Kind kind = Kind::Crash;
  /// Node name (crash, pause) or region name (oracle outage).
  std::string target;
  Nanos at = 0;
  /// Restart / resume / end of outage. Absent: never.
  std::optional<Nanos> until;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  ClockSection clocks;
  tsbatch::Mode ts_mode = tsbatch::Mode::Batched;
  Nanos ttl = 100_us;
  Nanos step = 10;
  simnet::NetworkConfig network;
  TopologySection topology;
  Nanos epoch_interval = 100_ms;
  Nanos flush_latency = 500_us;
  Nanos lease = 1000_ms;
  ReplicaPlacement replicas = ReplicaPlacement::Other;
  Nanos ship_interval = 1_ms;
  Nanos ship_rto = 250_ms;
  Nanos heartbeat_interval = 100_ms;
  Nanos heartbeat_timeout = 500_ms;
  Nanos rpc_timeout = 250_ms;
  Nanos rpc_sweep = 50_ms;
  WorkloadConfig workload;
  /// Reads issued by the reader of each region.
  replication::ReaderConfig reads;
  std::vector<FaultSpec> faults;
  Nanos drain = 2000_ms;
  /// Hard stop in virtual time.
  Nanos until = 600'000_ms;
  /// false: always run to `until`, even once the workload is done.
  bool stop_when_done = true;

  ProtocolConfig protocol() const;
  void validate() const;

  static Scenario parse(const std::string& yaml_text);
  static Scenario load(const std::string& path);
};

}  // namespace ttkv::harness
