#pragma once

#include <string>
#include <vector>

#include "ttkv/harness/history.hpp"

namespace ttkv::harness {

struct Verdict {
  std::string property;
  bool pass = true;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  /// First counterexample, human readable.
  std::string detail;
  /// Offending transactions (minimized for serializability failures).
  std::vector<TxnId> witness;

  void fail(std::string what) {
    if (pass) detail = std::move(what);
    pass = false;
    ++violations;
  }
};

/// begin < ts < end in true time for every committed transaction with a known end.
Verdict check_property1(const History& h);

/// end(a) < begin(b) implies ts(a) < ts(b) over committed transactions.
Verdict check_realtime_order(const History& h);

/// Replays committed transactions in timestamp order on an empty store; every
/// observed read must name the writer the replay produces.
Verdict check_serial_replay(const History& h);

/// Both of the above. A failing replay is shrunk greedily (at most
/// `shrink_steps` candidate removals) to a small set of offending transactions.
Verdict check_strict_serializability(const History& h, std::size_t shrink_steps = 1000);

/// Exhaustive reference: some serial order consistent with real time that
/// orders conflicting transactions by timestamp reproduces every read, and
/// real-time order implies timestamp order. Intended for <= 8 transactions.
bool brute_force_serializable(const History& h);

/// Per replica read: the view is the ceiling epoch of ts_read, each key shows
/// exactly the newest committed version with ts < ts_read and commit epoch <=
/// view, all-or-nothing per writer, and writers that ended before any observed
/// writer began are observed too.
Verdict check_replica_consistency(const History& h);

/// The cumulative waits-for graph has no cycle.
Verdict check_deadlock_freedom(const History& h);

/// Every epoch cut happens strictly after the epoch's promised end.
Verdict check_property2(const History& h);

/// At most one durable decision per transaction, exactly one for every
/// transaction with a write, client-visible outcomes agree with it, and no
/// reader observes a write of a transaction that did not commit.
Verdict check_durability(const History& h);

/// Oracle readings contain their issue instant; latest bounds increase per server.
Verdict check_oracle(const History& h);

std::vector<Verdict> check_all(const History& h);

}  // namespace ttkv::harness
