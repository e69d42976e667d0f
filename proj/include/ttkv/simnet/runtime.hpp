#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttkv/replication/storage.hpp"
#include "ttkv/simnet/event_loop.hpp"
#include "ttkv/simnet/messages.hpp"
#include "ttkv/simnet/network.hpp"
#include "ttkv/simnet/trace.hpp"
#include "ttkv/truetime/clock.hpp"

namespace ttkv::simnet {

/// Static routing facts shared by every node of a cluster.
struct Directory {
  std::uint32_t partitions = 0;
  std::vector<NodeId> data_nodes;
  std::vector<RegionId> partition_region;
  std::vector<replication::StreamId> data_streams;
  std::vector<replication::StreamId> recorder_streams;
  /// replicas[p] lists every replica node of partition p.
  std::vector<std::vector<NodeId>> replicas;
  /// read_replica[p][r]: the replica a reader in region r uses for p.
  std::vector<std::vector<NodeId>> read_replica;
  /// oracle[r]: the oracle server endpoint of region r.
  std::vector<NodeId> oracle;

  PartitionId partition_of(Key k) const { return static_cast<PartitionId>(k % partitions); }
};

enum class NodeStatus { Up, Down, Paused };

class Runtime;

/// Everything protocol code may touch: its own drifting clock and timers, the
/// network, shared storage and the trace. There is no ground-truth time here.
class Env {
 public:
  Env(Runtime& rt, NodeId self) : rt_(&rt), self_(self) {}

  NodeId self() const { return self_; }
  RegionId region() const;
  const std::string& name() const;

  Nanos local_now() const;
  void send(NodeId dst, Message m);
  /// Run `fn` once the node's local clock has advanced by `local_delay`.
  void after(Nanos local_delay, std::function<void()> fn);

  replication::SharedStorage& storage();
  /// Append and call `on_durable` once the storage flush completes.
  std::variant<std::uint64_t, replication::Fenced> append(replication::StreamId s, std::uint64_t generation,
                                                           replication::LogEntry e, std::function<void()> on_durable);
  /// Call `fn` after one storage flush (a durability barrier with no payload).
  void sync(std::function<void()> fn);

  void trace(trace::Body b);
  std::mt19937_64& rng();
  const Directory& directory() const;

 private:
  Runtime* rt_;
  NodeId self_;
};

class Node {
 public:
  explicit Node(std::string name) : name_(std::move(name)) {}
  virtual ~Node() = default;

  const std::string& name() const { return name_; }
  NodeId id() const { return id_; }

  virtual void on_start() {}
  virtual void on_message(NodeId src, const Message& m) = 0;
  /// Volatile state is lost; durable state lives in shared storage.
  virtual void on_crash() {}
  virtual void on_restart() { on_start(); }

 protected:
  Env& env() { return *env_; }
  const Env& env() const { return *env_; }

 private:
  friend class Runtime;
  std::string name_;
  NodeId id_ = kNoNode;
  Env* env_ = nullptr;
};

struct RuntimeStats {
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
  std::uint64_t duplicated = 0;
};

class Runtime {
 public:
  Runtime(std::uint64_t seed, NetworkConfig net, Nanos flush_latency, std::uint64_t event_cap = 200'000'000);

  EventLoop& loop() { return loop_; }
  Nanos true_now() const { return loop_.now(); }

  /// `oracle_link` marks a TTC endpoint; links to it use the oracle round trip.
  NodeId add(std::unique_ptr<Node> node, RegionId region, truetime::DriftClock clock, bool oracle_link = false);

  template <class T>
  T& get(NodeId id) {
    return dynamic_cast<T&>(*slots_.at(id).node);
  }
  Node& node(NodeId id) { return *slots_.at(id).node; }
  NodeId find(const std::string& name) const;
  std::size_t node_count() const { return slots_.size(); }
  RegionId region_of(NodeId id) const { return slots_.at(id).region; }
  NodeStatus status(NodeId id) const { return slots_.at(id).status; }
  const truetime::DriftClock& clock_of(NodeId id) const { return slots_.at(id).clock; }

  void start_all();
  void crash(NodeId id);
  void restart(NodeId id);
  void pause(NodeId id);
  void resume(NodeId id);

  replication::SharedStorage& storage() { return storage_; }
  Directory& directory() { return directory_; }
  const NetworkModel& network() const { return network_; }
  Nanos flush_latency() const { return flush_latency_; }
  const RuntimeStats& stats() const { return stats_; }

  trace::Trace& trace_log() { return trace_; }
  void emit(trace::Body b) { trace_.events.push_back(trace::Event{loop_.now(), std::move(b)}); }

  std::uint64_t run_until(Nanos deadline) { return loop_.run_until(deadline); }

 private:
  friend class Env;

  struct Slot {
    std::unique_ptr<Node> node;
    std::unique_ptr<Env> env;
    RegionId region = 0;
    truetime::DriftClock clock;
    bool oracle_link = false;
    NodeStatus status = NodeStatus::Up;
    std::uint32_t incarnation = 0;
    std::uint64_t send_seq = 0;
    std::mt19937_64 rng;
    std::vector<std::function<void()>> deferred;
  };

  void send(NodeId src, NodeId dst, Message m);
  /// Run `fn` on `id` after a true delay unless the node crashed meanwhile.
  void post(NodeId id, Nanos true_delay, std::function<void()> fn);
  void deliver(NodeId id, std::uint32_t incarnation, std::function<void()> fn);

  EventLoop loop_;
  NetworkModel network_;
  Nanos flush_latency_;
  std::uint64_t seed_;
  std::vector<Slot> slots_;
  std::unordered_map<std::string, NodeId> by_name_;
  replication::SharedStorage storage_;
  Directory directory_;
  trace::Trace trace_;
  RuntimeStats stats_;
};

}  // namespace ttkv::simnet
