#include "ttkv/simnet/rpc.hpp"

#include <vector>

namespace ttkv::simnet {

RpcClient::RpcClient(Env& env, Nanos timeout, Nanos sweep_interval)
    : env_(env), timeout_(timeout), sweep_interval_(sweep_interval) {
  // Ids must not repeat across restarts: servers cache replies by (src, id).
  next_ = (env_.rng()() >> 2) + 1;
}

ReqId RpcClient::call(Resolver dst, Message request, Callback on_reply) {
  ReqId id = next_++;
  set_request_id(request, id);
  auto [it, _] = pending_.emplace(id, Pending{std::move(dst), std::move(request), std::move(on_reply), 0});
  transmit(it->second);
  arm();
  return id;
}

void RpcClient::transmit(Pending& p) {
  p.sent_local = env_.local_now();
  NodeId dst = p.dst();
  if (dst != kNoNode) env_.send(dst, p.request);
}

bool RpcClient::handle(const Message& m) {
  auto id = response_id(m);
  if (!id) return false;
  auto it = pending_.find(*id);
  if (it == pending_.end()) return true;
  Callback cb = std::move(it->second.on_reply);
  pending_.erase(it);
  cb(m);
  return true;
}

void RpcClient::reset() {
  pending_.clear();
  armed_ = false;
  ++epoch_;
}

void RpcClient::arm() {
  if (armed_ || pending_.empty()) return;
  armed_ = true;
  env_.after(sweep_interval_, [this, e = epoch_] {
    if (e != epoch_) return;
    armed_ = false;
    sweep();
    arm();
  });
}

void RpcClient::sweep() {
  Nanos now = env_.local_now();
  std::vector<ReqId> due;
  for (auto& [id, p] : pending_)
    if (now - p.sent_local >= timeout_) due.push_back(id);
  for (ReqId id : due) {
    auto it = pending_.find(id);
    if (it != pending_.end()) transmit(it->second);
  }
}

}  // namespace ttkv::simnet
