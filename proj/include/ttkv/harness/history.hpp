#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttkv/simnet/trace.hpp"

namespace ttkv::harness {

enum class TxnOutcome { Committed, Aborted, Unknown };

struct ObservedRead {
  std::uint32_t index = 0;
  Key key = 0;
  /// Writer of the observed version; nullopt is the initial (empty) value.
  std::optional<TxnId> writer;
  std::optional<Timestamp> version;
};

struct ObservedWrite {
  std::uint32_t index = 0;
  Key key = 0;
  PartitionId partition = 0;
  Epoch proposed_epoch = 0;
};

struct TxnHistory {
  TxnId id;
  std::string tag;
  Nanos begin = 0;
  /// Client-visible end (commit or abort reply). Absent if never observed.
  std::optional<Nanos> end;
  std::optional<Timestamp> ts;
  TxnOutcome outcome = TxnOutcome::Unknown;
  std::optional<Epoch> commit_epoch;
  std::vector<ObservedRead> reads;
  std::vector<ObservedWrite> writes;
  /// What the coordinator reported, if anything.
  std::optional<bool> reported_commit;
  std::string abort_reason;
  /// Every durable decision event for this transaction.
  std::vector<trace::RecordDecided> decisions;

  bool has_writes() const { return !writes.empty(); }
};

struct ReplicaReadHistory {
  std::uint64_t read_id = 0;
  std::string reader;
  Timestamp ts_read;
  Epoch view = 0;
  std::vector<trace::KeyRead> keys;
  Nanos issued = 0;
  Nanos served = 0;
};

/// Per replica node: the serve timeline of one read request.
struct ReplicaRequestTimes {
  std::uint64_t read_id = 0;
  std::string node;
  Nanos arrived = 0;
  std::optional<Nanos> ready;
  std::optional<Nanos> served;
  std::uint32_t pushes = 0;
};

struct WaitEdgeRecord {
  std::string waiter;
  TxnId holder;
  Nanos at = 0;
};

/// Everything the checkers consume, rebuilt from a trace.
struct History {
  trace::Header header;
  std::vector<TxnHistory> txns;
  std::vector<ReplicaReadHistory> replica_reads;
  std::vector<ReplicaRequestTimes> replica_requests;
  std::vector<WaitEdgeRecord> waits;
  /// (node, epoch, true instant) of every epoch cut.
  std::vector<std::tuple<std::string, Epoch, Nanos>> cuts;
  /// replica node -> partition, and its (epoch, first instant) replay series.
  std::map<std::string, PartitionId> replica_partition;
  std::map<std::string, std::vector<std::pair<Epoch, Nanos>>> replayed;
  std::vector<trace::OracleIssued> oracle_issued;
  std::vector<Nanos> oracle_issued_at;
  Nanos end_of_trace = 0;

  const TxnHistory* find(const TxnId& t) const;
  std::vector<const TxnHistory*> committed() const;

  static History from_trace(const trace::Trace& t);
  /// Hand-built histories: transactions only, outcomes taken as given.
  static History from_txns(std::vector<TxnHistory> txns, Nanos epoch_interval = 100_ms);

 private:
  std::unordered_map<TxnId, std::size_t> index_;
};

}  // namespace ttkv::harness
