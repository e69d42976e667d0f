#include "ttkv/truetime/clock.hpp"

#include <algorithm>
#include <cmath>

namespace ttkv::truetime {

void ClockConfig::validate() const {
  if (max_drift < 0 || max_drift >= 0.01) {
    throw ConfigError("max_drift must be in [0, 0.01)");
  }
  for (const auto& [node, drift] : node_drift) {
    if (std::abs(drift) > max_drift * (1 + 1e-12)) {
      throw ConfigError("drift of node " + node + " exceeds max_drift");
    }
  }
}

DriftClock::DriftClock(double drift, Nanos offset)
    : factor_(drift >= 0 ? 1.0L + drift : 1.0L / (1.0L - drift)), drift_(drift), offset_(offset) {}

Nanos DriftClock::true_delay(Nanos local_duration) const {
  return static_cast<Nanos>(std::llround(static_cast<long double>(local_duration) * factor_));
}

Nanos DriftClock::local_at(Nanos true_instant) const {
  return offset_ + static_cast<Nanos>(std::llround(static_cast<long double>(true_instant) / factor_));
}

OracleServer::OracleServer(ServerId id, Nanos epsilon) : id_(id), epsilon_(epsilon) {}

OracleReading OracleServer::now(Nanos true_instant, double placement) {
  OracleReading out;
  if (!available_) {
    out.status = OracleReading::Status::Unavailable;
    return out;
  }
  const Nanos width = 2 * epsilon_;
  if (last_latest_ && true_instant + width <= *last_latest_) {
    out.status = OracleReading::Status::Busy;
    out.retry_at = *last_latest_ - width + 1;
    return out;
  }
  placement = std::clamp(placement, 0.0, 1.0);
  Nanos latest = true_instant + static_cast<Nanos>(std::llround(placement * static_cast<double>(width)));
  if (last_latest_) latest = std::max(latest, *last_latest_ + 1);
  last_latest_ = latest;
  out.time.latest = latest;
  out.time.earliest = latest >= width ? latest - width : 0;
  out.time.server_id = id_;
  return out;
}

}  // namespace ttkv::truetime
