#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "ttkv/core.hpp"
#include "ttkv/replication/storage.hpp"
#include "ttkv/truetime/clock.hpp"

namespace ttkv::simnet {

using ReqId = std::uint64_t;

struct OracleReq {
  ReqId req = 0;
};
struct OracleResp {
  ReqId req = 0;
  truetime::OracleReading reading;
};

struct ReadReq {
  ReqId req = 0;
  TxnId txn;
  Timestamp ts;
  Key key = 0;
};
struct ReadResp {
  ReqId req = 0;
  std::optional<Value> value;
  std::optional<Timestamp> version;
  std::optional<TxnId> writer;
};

struct WriteReq {
  ReqId req = 0;
  TxnId txn;
  Timestamp ts;
  Key key = 0;
  Value value;
  PartitionId recorder = 0;
};
struct WriteResp {
  ReqId req = 0;
  bool ok = false;
  Epoch epoch = 0;
};

struct PushReq {
  ReqId req = 0;
  TxnId txn;
};
struct PushResp {
  ReqId req = 0;
  TxnId txn;
  Decision decision = Decision::Abort;
  Epoch epoch = 0;
};

struct FinalizeReq {
  ReqId req = 0;
  TxnId txn;
  Decision decision = Decision::Abort;
  Epoch epoch = 0;
};
struct FinalizeResp {
  ReqId req = 0;
};

struct DecideReq {
  ReqId req = 0;
  TxnId txn;
  Decision decision = Decision::Abort;
  std::vector<Epoch> proposed;
};
struct DecideResp {
  ReqId req = 0;
  TxnId txn;
  Decision decision = Decision::Abort;
  Epoch epoch = 0;
};

/// Sent by the data node holding a transaction's first write so the recorder
/// tracks the transaction even if its coordinator dies before heartbeating.
struct RegisterReq {
  ReqId req = 0;
  TxnId txn;
};
struct RegisterResp {
  ReqId req = 0;
};

struct Heartbeat {
  NodeId coordinator = 0;
  std::uint32_t incarnation = 0;
  std::vector<TxnId> active;
};

struct RecorderPing {
  std::uint64_t seq = 0;
};
struct RecorderPong {
  std::uint64_t seq = 0;
};

struct ShipBatch {
  PartitionId partition = 0;
  std::uint64_t from = 0;
  std::vector<replication::LogEntry> entries;
};
struct ShipAck {
  PartitionId partition = 0;
  std::uint64_t applied = 0;
  /// The replica dropped a batch that started beyond `applied`.
  bool gap = false;
};

struct KeyValue {
  Key key = 0;
  std::optional<Value> value;
  std::optional<Timestamp> version;
  std::optional<TxnId> writer;
};

struct ReplicaReadReq {
  ReqId req = 0;
  std::uint64_t read_id = 0;
  Timestamp ts_read;
  Epoch view = 0;
  std::vector<Key> keys;
};
struct ReplicaReadResp {
  ReqId req = 0;
  std::vector<KeyValue> values;
};

using Message = std::variant<OracleReq, OracleResp, ReadReq, ReadResp, WriteReq, WriteResp, PushReq, PushResp,
                             FinalizeReq, FinalizeResp, DecideReq, DecideResp, RegisterReq, RegisterResp, Heartbeat,
                             RecorderPing, RecorderPong, ShipBatch, ShipAck, ReplicaReadReq, ReplicaReadResp>;

template <class T>
inline constexpr bool is_response_v =
    std::is_same_v<T, OracleResp> || std::is_same_v<T, ReadResp> || std::is_same_v<T, WriteResp> ||
    std::is_same_v<T, PushResp> || std::is_same_v<T, FinalizeResp> || std::is_same_v<T, DecideResp> ||
    std::is_same_v<T, RegisterResp> || std::is_same_v<T, ReplicaReadResp>;

/// Request id of a response message, if it is one.
std::optional<ReqId> response_id(const Message& m);

/// Stamp a request id onto a request message.
void set_request_id(Message& m, ReqId req);

struct Envelope {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  /// Monotone per-sender sequence number.
  std::uint64_t seq = 0;
  std::shared_ptr<const Message> msg;
};

}  // namespace ttkv::simnet
