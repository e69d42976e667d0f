#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ttkv/core.hpp"

namespace ttkv::trace {

struct OracleIssued {
  ServerId server = 0;
  Nanos earliest = 0;
  Nanos latest = 0;
};

struct TxnBegin {
  TxnId txn;
  std::string tag;
};

struct TsAssigned {
  TxnId txn;
  Timestamp ts;
};

struct ReadDone {
  TxnId txn;
  std::uint32_t index = 0;
  Key key = 0;
  PartitionId partition = 0;
  std::optional<Timestamp> version;
  std::optional<TxnId> writer;
};

struct WriteDone {
  TxnId txn;
  std::uint32_t index = 0;
  Key key = 0;
  PartitionId partition = 0;
  Epoch proposed_epoch = 0;
};

struct CommitRequested {
  TxnId txn;
};

struct TxnCommitted {
  TxnId txn;
  std::optional<Epoch> epoch;
};

struct TxnAborted {
  TxnId txn;
  std::string reason;
};

struct RecordDecided {
  TxnId txn;
  std::string node;
  bool committed = false;
  Epoch epoch = 0;
};

/// `waiter` blocks until `holder`'s fate is durable.
struct WaitEdge {
  std::string waiter;
  TxnId holder;
};

struct EpochCut {
  std::string node;
  Epoch epoch = 0;
};

struct ReplayedEpoch {
  std::string node;
  PartitionId partition = 0;
  Epoch epoch = 0;
};

struct ReplicaReqArrived {
  std::uint64_t read_id = 0;
  std::string node;
};

struct ReplicaReqReady {
  std::uint64_t read_id = 0;
  std::string node;
};

struct ReplicaReqServed {
  std::uint64_t read_id = 0;
  std::string node;
  std::uint32_t pushes = 0;
};

struct ReplicaReadIssued {
  std::uint64_t read_id = 0;
  std::string reader;
};

struct KeyRead {
  Key key = 0;
  std::optional<Timestamp> version;
  std::optional<TxnId> writer;

  bool operator==(const KeyRead&) const = default;
};

struct ReplicaRead {
  std::uint64_t read_id = 0;
  std::string reader;
  Timestamp ts_read;
  Epoch view = 0;
  std::vector<KeyRead> keys;
};

struct NodeDown {
  std::string node;
};

struct NodeUp {
  std::string node;
};

struct Takeover {
  std::string node;
  std::string role;
  std::uint64_t generation = 0;
};

struct Retired {
  std::string node;
  std::string role;
};

using Body = std::variant<OracleIssued, TxnBegin, TsAssigned, ReadDone, WriteDone, CommitRequested, TxnCommitted,
                          TxnAborted, RecordDecided, WaitEdge, EpochCut, ReplayedEpoch, ReplicaReqArrived,
                          ReplicaReqReady, ReplicaReqServed, ReplicaReadIssued, ReplicaRead, NodeDown, NodeUp,
                          Takeover, Retired>;

/// One trace record, stamped with the true instant it was emitted.
struct Event {
  Nanos at = 0;
  Body body;
};

struct Header {
  std::uint64_t seed = 0;
  Nanos epoch_interval = 0;
  Nanos epsilon = 0;
  double max_drift = 0;
  std::string scenario;
};

struct Trace {
  Header header;
  std::vector<Event> events;
};

const char* type_name(const Body& b);

/// JSON lines: a header record followed by one record per event.
void write_jsonl(std::ostream& out, const Trace& trace);
Trace read_jsonl(std::istream& in);

void save(const std::string& path, const Trace& trace);
Trace load(const std::string& path);

}  // namespace ttkv::trace
