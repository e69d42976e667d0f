#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ttkv/core.hpp"
#include "ttkv/mvto/partition_store.hpp"

namespace ttkv::replication {

struct IntentEntry {
  Key key = 0;
  mvto::WriteIntent intent;
};

struct FinalizeEntry {
  TxnId txn;
  Decision decision = Decision::Abort;
  Epoch epoch = 0;
};

struct EpochCutEntry {
  Epoch epoch = 0;
};

struct TxnRecordEntry {
  TxnId txn;
  Decision decision = Decision::Abort;
  Epoch epoch = 0;
};

/// A transaction the recorder must eventually decide.
struct TxnRegisteredEntry {
  TxnId txn;
};

using LogEntry = std::variant<IntentEntry, FinalizeEntry, EpochCutEntry, TxnRecordEntry, TxnRegisteredEntry>;

std::string describe(const LogEntry& e);

struct Fenced {};

using StreamId = std::uint32_t;

/// Linearizable ownership register of one stream.
struct Membership {
  std::uint64_t generation = 0;
  NodeId owner = kNoNode;
};

/// Region-local shared storage: named append-only streams, each guarded by a
/// membership register. An append is accepted only from the current
/// generation and is durable once accepted; callers model the flush latency
/// before acknowledging.
class SharedStorage {
 public:
  SharedStorage() = default;

  StreamId open(const std::string& name);
  const std::string& name(StreamId s) const { return streams_.at(s).name; }
  std::size_t stream_count() const { return streams_.size(); }

  Membership membership(StreamId s) const { return streams_.at(s).member; }

  /// Succeeds iff the stream's generation equals `expected`; the new
  /// generation is expected + 1.
  std::optional<std::uint64_t> compare_and_swap(StreamId s, std::uint64_t expected, NodeId owner);

  std::variant<std::uint64_t, Fenced> append(StreamId s, std::uint64_t generation, LogEntry entry);

  const std::vector<LogEntry>& entries(StreamId s) const { return streams_.at(s).log; }
  std::size_t size(StreamId s) const { return streams_.at(s).log.size(); }

  /// Mirror every accepted append as a text line under `dir`.
  void mirror_to(const std::string& dir);

 private:
  struct Stream {
    std::string name;
    Membership member;
    std::vector<LogEntry> log;
    std::unique_ptr<std::ofstream> mirror;
  };

  std::vector<Stream> streams_;
  std::unordered_map<std::string, StreamId> by_name_;
  std::optional<std::string> mirror_dir_;
};

}  // namespace ttkv::replication
