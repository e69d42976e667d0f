#pragma once

#include <map>
#include <optional>
#include <string>

#include "ttkv/core.hpp"

namespace ttkv::truetime {

/// An uncertainty-bounded reading from a TTC oracle server.
struct UncertainTime {
  Nanos earliest = 0;
  Nanos latest = 0;
  ServerId server_id = 0;

  bool contains(Nanos instant) const { return earliest <= instant && instant <= latest; }
  Nanos width() const { return latest - earliest; }
};

struct ClockConfig {
  Nanos epsilon = 100_us;
  double max_drift = 200e-6;
  /// Per-node drift (signed fraction). Positive drift is a slow clock.
  std::map<std::string, double> node_drift;

  void validate() const;
};

/// Ordinary server clock with a constant drift rate. A positive drift means the
/// clock runs slow: a local duration d spans d * (1 + drift) of true time. A
/// negative drift runs fast: d spans d / (1 + |drift|).
class DriftClock {
 public:
  explicit DriftClock(double drift = 0.0, Nanos offset = 0);

  double drift() const { return drift_; }

  /// True time covered by a local timer of `local_duration`.
  Nanos true_delay(Nanos local_duration) const;

  /// Local clock reading at a true instant.
  Nanos local_at(Nanos true_instant) const;

 private:
  long double factor_;
  double drift_;
  Nanos offset_;
};

/// Outcome of asking an oracle server for the time.
struct OracleReading {
  enum class Status { Ok, Unavailable, Busy } status = Status::Ok;
  UncertainTime time{};
  /// When Busy: the first true instant at which a fresh bound can be issued.
  Nanos retry_at = 0;
};

/// One TTC oracle server. Latest bounds are strictly increasing per server and
/// every reading contains the true instant it was issued at.
class OracleServer {
 public:
  OracleServer(ServerId id, Nanos epsilon);

  ServerId id() const { return id_; }
  Nanos epsilon() const { return epsilon_; }

  bool available() const { return available_; }
  void set_available(bool up) { available_ = up; }

  /// `placement` in [0, 1] positions the true instant inside the interval:
  /// latest = true + placement * 2 * epsilon. 0.5 is a symmetric bound.
  OracleReading now(Nanos true_instant, double placement);

 private:
  ServerId id_;
  Nanos epsilon_;
  bool available_ = true;
  std::optional<Nanos> last_latest_;
};

}  // namespace ttkv::truetime
