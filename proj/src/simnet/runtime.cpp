#include "ttkv/simnet/runtime.hpp"

namespace ttkv::simnet {

RegionId Env::region() const { return rt_->slots_[self_].region; }
const std::string& Env::name() const { return rt_->slots_[self_].node->name(); }

Nanos Env::local_now() const { return rt_->slots_[self_].clock.local_at(rt_->loop_.now()); }

void Env::send(NodeId dst, Message m) { rt_->send(self_, dst, std::move(m)); }

void Env::after(Nanos local_delay, std::function<void()> fn) {
  rt_->post(self_, rt_->slots_[self_].clock.true_delay(local_delay), std::move(fn));
}

replication::SharedStorage& Env::storage() { return rt_->storage_; }

std::variant<std::uint64_t, replication::Fenced> Env::append(replication::StreamId s, std::uint64_t generation,
                                                              replication::LogEntry e,
                                                              std::function<void()> on_durable) {
  auto r = rt_->storage_.append(s, generation, std::move(e));
  if (std::holds_alternative<std::uint64_t>(r) && on_durable) rt_->post(self_, rt_->flush_latency_, std::move(on_durable));
  return r;
}

void Env::sync(std::function<void()> fn) { rt_->post(self_, rt_->flush_latency_, std::move(fn)); }

void Env::trace(trace::Body b) { rt_->emit(std::move(b)); }

std::mt19937_64& Env::rng() { return rt_->slots_[self_].rng; }

const Directory& Env::directory() const { return rt_->directory_; }

Runtime::Runtime(std::uint64_t seed, NetworkConfig net, Nanos flush_latency, std::uint64_t event_cap)
    : loop_(seed, event_cap), network_(std::move(net)), flush_latency_(flush_latency), seed_(seed) {
  network_.config().validate();
}

NodeId Runtime::add(std::unique_ptr<Node> node, RegionId region, truetime::DriftClock clock, bool oracle_link) {
  if (region >= network_.config().matrix.size()) throw ConfigError("node placed in unknown region");
  NodeId id = static_cast<NodeId>(slots_.size());
  if (by_name_.count(node->name())) throw ConfigError("duplicate node name " + node->name());
  by_name_[node->name()] = id;
  Slot s;
  s.node = std::move(node);
  s.env = std::make_unique<Env>(*this, id);
  s.region = region;
  s.clock = clock;
  s.oracle_link = oracle_link;
  s.rng.seed(seed_ * 0x9e3779b97f4a7c15ull + id + 1);
  s.node->id_ = id;
  s.node->env_ = s.env.get();
  slots_.push_back(std::move(s));
  return id;
}

NodeId Runtime::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ConfigError("unknown node " + name);
  return it->second;
}

void Runtime::start_all() {
  for (NodeId id = 0; id < slots_.size(); ++id) {
    std::uint32_t inc = slots_[id].incarnation;
    loop_.schedule_at(loop_.now(), [this, id, inc] { deliver(id, inc, [this, id] { slots_[id].node->on_start(); }); });
  }
}

void Runtime::crash(NodeId id) {
  Slot& s = slots_.at(id);
  if (s.status == NodeStatus::Down) return;
  s.status = NodeStatus::Down;
  ++s.incarnation;
  s.deferred.clear();
  s.node->on_crash();
  emit(trace::NodeDown{s.node->name()});
}

void Runtime::restart(NodeId id) {
  Slot& s = slots_.at(id);
  if (s.status != NodeStatus::Down) return;
  s.status = NodeStatus::Up;
  emit(trace::NodeUp{s.node->name()});
  s.node->on_restart();
}

void Runtime::pause(NodeId id) {
  Slot& s = slots_.at(id);
  if (s.status == NodeStatus::Up) s.status = NodeStatus::Paused;
}

void Runtime::resume(NodeId id) {
  Slot& s = slots_.at(id);
  if (s.status != NodeStatus::Paused) return;
  s.status = NodeStatus::Up;
  auto pending = std::move(s.deferred);
  s.deferred.clear();
  std::uint32_t inc = s.incarnation;
  for (auto& fn : pending) {
    loop_.schedule_at(loop_.now(), [this, id, inc, fn = std::move(fn)]() mutable { deliver(id, inc, std::move(fn)); });
  }
}

void Runtime::deliver(NodeId id, std::uint32_t incarnation, std::function<void()> fn) {
  Slot& s = slots_[id];
  if (s.incarnation != incarnation || s.status == NodeStatus::Down) return;
  if (s.status == NodeStatus::Paused) {
    s.deferred.push_back(std::move(fn));
    return;
  }
  fn();
}

void Runtime::post(NodeId id, Nanos true_delay, std::function<void()> fn) {
  std::uint32_t inc = slots_[id].incarnation;
  loop_.schedule_after(true_delay, [this, id, inc, fn = std::move(fn)]() mutable { deliver(id, inc, std::move(fn)); });
}

void Runtime::send(NodeId src, NodeId dst, Message m) {
  Slot& from = slots_.at(src);
  const Slot& to = slots_.at(dst);
  ++stats_.sent;
  const auto& cfg = network_.config();
  auto& rng = loop_.rng();
  std::uniform_real_distribution<double> u(0, 1);
  if (network_.partitioned(from.region, to.region, loop_.now()) || (cfg.drop_prob > 0 && u(rng) < cfg.drop_prob)) {
    ++stats_.dropped;
    return;
  }
  bool oracle_link = (from.oracle_link || to.oracle_link) && from.region == to.region;
  auto msg = std::make_shared<const Message>(std::move(m));
  int copies = 1;
  if (cfg.duplicate_prob > 0 && u(rng) < cfg.duplicate_prob) {
    ++copies;
    ++stats_.duplicated;
  }
  std::uint64_t seq = ++from.send_seq;
  for (int i = 0; i < copies; ++i) {
    Nanos delay = network_.sample_delay(from.region, to.region, oracle_link, rng);
    Envelope env{src, dst, seq, msg};
    std::uint32_t inc = to.incarnation;
    loop_.schedule_after(delay, [this, env, inc] {
      deliver(env.dst, inc, [this, env] { slots_[env.dst].node->on_message(env.src, *env.msg); });
    });
  }
}

}  // namespace ttkv::simnet
