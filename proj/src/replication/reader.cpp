#include "ttkv/replication/reader.hpp"

#include <algorithm>

namespace ttkv::replication {

ReaderNode::ReaderNode(std::string name, ReaderConfig cfg, ProtocolConfig proto, NodeId oracle,
                       harness::KeySampler keys, std::vector<Key> slow_keys)
    : Node(std::move(name)),
      cfg_(cfg),
      proto_(proto),
      oracle_(oracle),
      keys_(std::move(keys)),
      slow_keys_(std::move(slow_keys)) {}

void ReaderNode::on_start() {
  ++gen_;
  ts_ = std::make_unique<tsbatch::TimestampSource>(env(), proto_.ts, oracle_);
  rpc_ = std::make_unique<simnet::RpcClient>(env(), proto_.rpc_timeout, proto_.rpc_sweep);
  std::uniform_int_distribution<Nanos> stagger(0, cfg_.think);
  for (std::size_t s = 0; s < cfg_.concurrency; ++s)
    env().after(stagger(env().rng()), [this, s, g = gen_] {
      if (g == gen_) next(s);
    });
}

void ReaderNode::on_crash() {
  ++gen_;
  inflight_.clear();
  if (rpc_) rpc_->reset();
  if (ts_) ts_->reset();
}

void ReaderNode::on_message(NodeId, const simnet::Message& m) {
  if (ts_ && ts_->handle(m)) return;
  if (rpc_) rpc_->handle(m);
}

std::vector<Key> ReaderNode::pick_keys() {
  std::vector<Key> out;
  auto& rng = env().rng();
  std::uint32_t want = std::min<std::uint64_t>(cfg_.keys_per_read, keys_.key_count());
  if (!slow_keys_.empty() && std::bernoulli_distribution(cfg_.slow_key_prob)(rng)) {
    out.push_back(slow_keys_[std::uniform_int_distribution<std::size_t>(0, slow_keys_.size() - 1)(rng)]);
  }
  while (out.size() < want) {
    Key k = keys_.sample(rng);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

void ReaderNode::next(std::size_t slot) {
  if (issued_ >= cfg_.reads) return;
  ++issued_;
  ts_->acquire([this, slot, g = gen_](std::optional<tsbatch::TsGrant> grant) {
    if (g != gen_) return;
    if (!grant) {
      --issued_;
      env().after(10_ms, [this, slot, g] {
        if (g == gen_) next(slot);
      });
      return;
    }
    issue(slot, *grant);
  });
}

void ReaderNode::issue(std::size_t slot, const tsbatch::TsGrant& g) {
  const auto& dir = env().directory();
  const std::uint64_t read_id = (std::uint64_t{id()} << 32) | counter_++;
  Inflight& f = inflight_[read_id];
  f.ts_read = g.ts;
  f.view = proto_.epochs.ceiling_epoch(g.ts.nanos);
  f.keys = pick_keys();
  f.slot = slot;
  std::map<PartitionId, std::vector<Key>> groups;
  for (Key k : f.keys) groups[dir.partition_of(k)].push_back(k);
  f.outstanding = groups.size();
  env().trace(trace::ReplicaReadIssued{read_id, name()});
  for (auto& [p, keys] : groups) {
    NodeId dst = dir.read_replica[p][env().region()];
    rpc_->call(dst, simnet::ReplicaReadReq{0, read_id, f.ts_read, f.view, keys},
               [this, read_id, gen = gen_](const simnet::Message& m) {
                 if (gen != gen_) return;
                 auto it = inflight_.find(read_id);
                 if (it == inflight_.end()) return;
                 Inflight& f = it->second;
                 for (const auto& kv : std::get<simnet::ReplicaReadResp>(m).values)
                   f.got[kv.key] = trace::KeyRead{kv.key, kv.version, kv.writer};
                 if (--f.outstanding > 0) return;
                 trace::ReplicaRead done{read_id, name(), f.ts_read, f.view, {}};
                 for (Key k : f.keys) done.keys.push_back(f.got.at(k));
                 env().trace(std::move(done));
                 ++completed_;
                 std::size_t slot = f.slot;
                 inflight_.erase(it);
                 env().after(cfg_.think, [this, slot, gen] {
                   if (gen == gen_) next(slot);
                 });
               });
  }
}

}  // namespace ttkv::replication
