#include "ttkv/protocol.hpp"

namespace ttkv {

void ProtocolConfig::validate() const {
  ts.validate();
  if (epochs.interval == 0) throw ConfigError("epoch interval must be positive");
  if (heartbeat_interval == 0 || heartbeat_timeout <= heartbeat_interval)
    throw ConfigError("heartbeat timeout must exceed the heartbeat interval");
  if (rpc_timeout == 0 || rpc_sweep == 0) throw ConfigError("rpc timers must be positive");
  if (ship_interval == 0 || ship_window == 0) throw ConfigError("shipping knobs must be positive");
}

}  // namespace ttkv
