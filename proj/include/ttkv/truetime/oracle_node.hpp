#pragma once

#include <functional>

#include "ttkv/simnet/runtime.hpp"
#include "ttkv/truetime/clock.hpp"

namespace ttkv::truetime {

/// Where the true instant sits inside an issued interval.
enum class Placement { Center, Random, Extreme };

const char* to_string(Placement p);
Placement parse_placement(const std::string& text);

/// A TTC oracle server on the simulated network. It is part of the simulated
/// hardware, so it is handed the ground-truth clock; protocol nodes are not.
class OracleNode : public simnet::Node {
 public:
  OracleNode(std::string name, ServerId server, Nanos epsilon, std::function<Nanos()> true_clock);

  OracleServer& server() { return server_; }
  std::uint64_t issued() const { return issued_; }
  /// Extreme puts the true instant at either edge, chosen at random.
  void set_placement(Placement p) { placement_ = p; }

  void on_message(NodeId src, const simnet::Message& m) override;

 private:
  void answer(NodeId src, simnet::ReqId req);

  OracleServer server_;
  std::function<Nanos()> true_clock_;
  std::uint64_t issued_ = 0;
  Placement placement_ = Placement::Random;
};

}  // namespace ttkv::truetime
