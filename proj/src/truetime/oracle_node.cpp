#include "ttkv/truetime/oracle_node.hpp"

#include <random>

namespace ttkv::truetime {

const char* to_string(Placement p) {
  switch (p) {
    case Placement::Center:
      return "center";
    case Placement::Random:
      return "random";
    case Placement::Extreme:
      return "extreme";
  }
  return "?";
}

Placement parse_placement(const std::string& text) {
  if (text == "center") return Placement::Center;
  if (text == "random") return Placement::Random;
  if (text == "extreme") return Placement::Extreme;
  throw ConfigError("unknown oracle placement: " + text);
}

OracleNode::OracleNode(std::string name, ServerId server, Nanos epsilon, std::function<Nanos()> true_clock)
    : Node(std::move(name)), server_(server, epsilon), true_clock_(std::move(true_clock)) {}

void OracleNode::on_message(NodeId src, const simnet::Message& m) {
  if (const auto* req = std::get_if<simnet::OracleReq>(&m)) answer(src, req->req);
}

void OracleNode::answer(NodeId src, simnet::ReqId req) {
  Nanos t = true_clock_();
  double placement = 0.5;
  if (placement_ == Placement::Random) placement = std::uniform_real_distribution<double>(0, 1)(env().rng());
  if (placement_ == Placement::Extreme) placement = std::bernoulli_distribution(0.5)(env().rng()) ? 1.0 : 0.0;
  OracleReading r = server_.now(t, placement);
  if (r.status == OracleReading::Status::Busy) {
    env().after(r.retry_at - t, [this, src, req] { answer(src, req); });
    return;
  }
  if (r.status == OracleReading::Status::Ok) {
    ++issued_;
    env().trace(trace::OracleIssued{r.time.server_id, r.time.earliest, r.time.latest});
  }
  env().send(src, simnet::OracleResp{req, r});
}

}  // namespace ttkv::truetime
