#pragma once

#include <functional>
#include <map>

#include "ttkv/simnet/runtime.hpp"

namespace ttkv::simnet {

/// At-least-once request helper. Requests are resent to a freshly resolved
/// destination until a response with the same id arrives. One periodic sweep
/// timer per client handles every outstanding request.
class RpcClient {
 public:
  using Resolver = std::function<NodeId()>;
  using Callback = std::function<void(const Message&)>;

  RpcClient(Env& env, Nanos timeout, Nanos sweep_interval);

  ReqId call(Resolver dst, Message request, Callback on_reply);
  ReqId call(NodeId dst, Message request, Callback on_reply) {
    return call([dst] { return dst; }, std::move(request), std::move(on_reply));
  }

  /// Returns true if `m` answered an outstanding request (and runs its callback).
  bool handle(const Message& m);

  void cancel(ReqId id) { pending_.erase(id); }
  /// Forget all outstanding requests (node crash).
  void reset();

  std::size_t outstanding() const { return pending_.size(); }

 private:
  struct Pending {
    Resolver dst;
    Message request;
    Callback on_reply;
    Nanos sent_local = 0;
  };

  void transmit(Pending& p);
  void arm();
  void sweep();

  Env& env_;
  Nanos timeout_;
  Nanos sweep_interval_;
  ReqId next_ = 1;
  bool armed_ = false;
  std::uint64_t epoch_ = 0;
  std::map<ReqId, Pending> pending_;
};

}  // namespace ttkv::simnet
