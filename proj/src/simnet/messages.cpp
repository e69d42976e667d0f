#include "ttkv/simnet/messages.hpp"

namespace ttkv::simnet {

std::optional<ReqId> response_id(const Message& m) {
  return std::visit(
      [](const auto& v) -> std::optional<ReqId> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (is_response_v<T>) return v.req;
        return std::nullopt;
      },
      m);
}

void set_request_id(Message& m, ReqId req) {
  std::visit(
      [req](auto& v) {
        if constexpr (requires { v.req; }) v.req = req;
      },
      m);
}

}  // namespace ttkv::simnet
