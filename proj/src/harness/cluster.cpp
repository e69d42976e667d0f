#include "ttkv/harness/cluster.hpp"

#include <algorithm>

#include "ttkv/mvto/data_node.hpp"
#include "ttkv/replication/reader.hpp"
#include "ttkv/replication/replica.hpp"
#include "ttkv/truetime/oracle_node.hpp"
#include "ttkv/txn/coordinator.hpp"
#include "ttkv/txn/recorder.hpp"

namespace ttkv::harness {

namespace {
constexpr Nanos kPollInterval = 100_ms;
}

Cluster::~Cluster() = default;

truetime::DriftClock Cluster::clock_for(const std::string& name, std::size_t index) {
  const auto& c = scenario_.clocks;
  Nanos offset = std::uniform_int_distribution<Nanos>(0, 1'000'000_ms)(rng_);
  double drift = 0;
  if (auto it = c.overrides.find(name); it != c.overrides.end()) {
    drift = it->second;
  } else if (c.drift_mode == DriftMode::Random) {
    drift = std::uniform_real_distribution<double>(-c.max_drift, c.max_drift)(rng_);
  } else if (c.drift_mode == DriftMode::Adversarial) {
    drift = (index % 2 == 0) ? c.max_drift : -c.max_drift;
  }
  return truetime::DriftClock(drift, offset);
}

Cluster::Cluster(Scenario s) : scenario_(std::move(s)), rng_(scenario_.seed ^ 0x5eedc1u) {
  scenario_.validate();
  const ProtocolConfig proto = scenario_.protocol();
  rt_ = std::make_unique<simnet::Runtime>(scenario_.seed, scenario_.network, scenario_.flush_latency);
  gen_ = std::make_unique<WorkloadGenerator>(scenario_.workload, scenario_.seed, scenario_.epoch_interval);
  rt_->trace_log().header = trace::Header{scenario_.seed, scenario_.epoch_interval, scenario_.clocks.epsilon,
                                          scenario_.clocks.max_drift, scenario_.name};

  const auto& regions = scenario_.network.matrix.regions();
  const std::uint32_t R = static_cast<std::uint32_t>(regions.size());
  const std::uint32_t P = scenario_.topology.partitions;
  auto& dir = rt_->directory();
  auto& storage = rt_->storage();
  std::size_t index = 0;

  for (RegionId r = 0; r < R; ++r) {
    auto node = std::make_unique<truetime::OracleNode>("oracle." + regions[r], r, scenario_.clocks.epsilon,
                                                       [rt = rt_.get()] { return rt->true_now(); });
    node->set_placement(scenario_.clocks.oracle_placement);
    oracles_.push_back(node.get());
    dir.oracle.push_back(rt_->add(std::move(node), r, truetime::DriftClock(), true));
  }

  dir.partitions = P;
  for (PartitionId p = 0; p < P; ++p) {
    dir.partition_region.push_back(p % R);
    dir.data_streams.push_back(storage.open("data." + std::to_string(p)));
    dir.recorder_streams.push_back(storage.open("rec." + std::to_string(p)));
  }

  // Replicas first so data nodes can be handed their replica lists.
  dir.replicas.assign(P, {});
  dir.read_replica.assign(P, std::vector<NodeId>(R, kNoNode));
  if (scenario_.replicas != ReplicaPlacement::None) {
    for (PartitionId p = 0; p < P; ++p) {
      for (RegionId r = 0; r < R; ++r) {
        if (scenario_.replicas == ReplicaPlacement::Other && r == dir.partition_region[p]) continue;
        std::string name = "replica." + std::to_string(p) + "." + regions[r];
        auto node = std::make_unique<replication::ReplicaNode>(name, p, proto);
        replicas_.push_back(node.get());
        NodeId id = rt_->add(std::move(node), r, clock_for(name, index++));
        dir.replicas[p].push_back(id);
        dir.read_replica[p][r] = id;
      }
      // Regions without a local replica read from the nearest one.
      for (RegionId r = 0; r < R; ++r) {
        if (dir.read_replica[p][r] != kNoNode) continue;
        NodeId best = kNoNode;
        double best_rtt = 0;
        for (NodeId id : dir.replicas[p]) {
          double rtt = scenario_.network.matrix.rtt_ms(r, rt_->region_of(id));
          if (best == kNoNode || rtt < best_rtt) best = id, best_rtt = rtt;
        }
        dir.read_replica[p][r] = best;
      }
    }
  }

  for (PartitionId p = 0; p < P; ++p) {
    const RegionId r = dir.partition_region[p];
    std::string name = "data." + std::to_string(p);
    auto node = std::make_unique<mvto::DataNode>(name, p, proto, dir.oracle[r]);
    data_.push_back(node.get());
    dir.data_nodes.push_back(rt_->add(std::move(node), r, clock_for(name, index++)));
    for (const char* suffix : {"a", "b"}) {
      std::string rname = "rec." + std::to_string(p) + "." + suffix;
      auto rec = std::make_unique<txn::RecorderNode>(rname, p, suffix[0] == 'a', proto, dir.oracle[r]);
      recorders_.push_back(rec.get());
      rt_->add(std::move(rec), r, clock_for(rname, index++));
    }
  }

  for (RegionId r = 0; r < R; ++r) {
    for (std::uint32_t i = 0; i < scenario_.topology.coordinators_per_region; ++i) {
      std::string name = "coord." + regions[r] + "." + std::to_string(i);
      auto node = std::make_unique<txn::CoordinatorNode>(name, scenario_.topology.clients_per_coordinator, proto,
                                                         dir.oracle[r], [g = gen_.get()] { return g->next(); });
      coords_.push_back(node.get());
      rt_->add(std::move(node), r, clock_for(name, index++));
    }
  }

  if (scenario_.reads.reads > 0) {
    for (RegionId r = 0; r < R; ++r) {
      std::string name = "reader." + regions[r];
      auto node = std::make_unique<replication::ReaderNode>(name, scenario_.reads, proto, dir.oracle[r],
                                                            gen_->keys(), gen_->slow_keys());
      readers_.push_back(node.get());
      rt_->add(std::move(node), r, clock_for(name, index++));
    }
  }

  schedule_faults();
}

void Cluster::schedule_faults() {
  auto& loop = rt_->loop();
  for (const FaultSpec& f : scenario_.faults) {
    last_fault_ = std::max(last_fault_, f.until.value_or(f.at));
    if (f.kind == FaultSpec::Kind::OracleOutage) {
      truetime::OracleNode* o = oracles_.at(scenario_.network.matrix.region_index(f.target));
      loop.schedule_at(f.at, [o] { o->server().set_available(false); });
      if (f.until) loop.schedule_at(*f.until, [o] { o->server().set_available(true); });
      continue;
    }
    NodeId id = rt_->find(f.target);
    simnet::Runtime* rt = rt_.get();
    if (f.kind == FaultSpec::Kind::Crash) {
      loop.schedule_at(f.at, [rt, id] { rt->crash(id); });
      if (f.until) loop.schedule_at(*f.until, [rt, id] { rt->restart(id); });
    } else {
      loop.schedule_at(f.at, [rt, id] { rt->pause(id); });
      if (f.until) loop.schedule_at(*f.until, [rt, id] { rt->resume(id); });
    }
  }
}

bool Cluster::workload_done() const {
  for (const auto* c : coords_)
    if (rt_->status(c->id()) == simnet::NodeStatus::Up && !c->idle()) return false;
  if (!gen_->exhausted()) return false;
  for (const auto* r : readers_)
    if (rt_->status(r->id()) == simnet::NodeStatus::Up && !r->idle()) return false;
  return true;
}

void Cluster::run_for(Nanos d) {
  if (!started_) {
    rt_->start_all();
    started_ = true;
  }
  rt_->run_until(rt_->true_now() + d);
}

RunSummary Cluster::run() {
  RunSummary out;
  if (!started_) {
    rt_->start_all();
    started_ = true;
  }
  const Nanos stop = scenario_.until;
  while (rt_->true_now() < stop) {
    out.events += rt_->run_until(std::min(stop, rt_->true_now() + kPollInterval));
    if (scenario_.stop_when_done && rt_->true_now() >= last_fault_ && workload_done()) {
      out.completed = true;
      out.events += rt_->run_until(std::min(stop, rt_->true_now() + scenario_.drain));
      break;
    }
  }
  if (!scenario_.stop_when_done) out.completed = workload_done();
  out.finished_at = rt_->true_now();
  for (const auto* c : coords_) {
    out.committed += c->stats().committed;
    out.aborted += c->stats().aborted;
  }
  return out;
}

}  // namespace ttkv::harness
