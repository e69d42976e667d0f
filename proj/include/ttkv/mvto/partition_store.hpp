#pragma once

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ttkv/core.hpp"

namespace ttkv::mvto {

/// An undetermined write. Its timestamp is the writer's start timestamp.
struct WriteIntent {
  TxnId txn;
  Timestamp ts;
  Value value;
  PartitionId recorder = 0;
  /// Epoch in force on the node when the intent was applied.
  Epoch logged_epoch = 0;
};

/// A finalized version. Aborted writes stay in the chain, marked invisible.
struct Version {
  TxnId txn;
  Value value;
  Epoch epoch = 0;
  bool visible = true;
};

struct VersionChain {
  std::map<Timestamp, Version> committed;
  std::map<Timestamp, WriteIntent> write_stream;
  Timestamp read_tracker{};
};

struct ReadResult {
  std::optional<Value> value;
  std::optional<Timestamp> version_ts;
  std::optional<TxnId> writer;
  std::vector<TxnId> pushed;

  bool operator==(const ReadResult&) const = default;
};

/// An undetermined intent the read must resolve through its recorder.
struct Blocker {
  TxnId txn;
  PartitionId recorder = 0;
  Timestamp ts;
};

/// Either a ready result or the intents that must be resolved first.
struct ReadEval {
  bool ready = false;
  ReadResult result;
  std::vector<Blocker> blockers;
};

struct WriteAck {
  Epoch proposed_epoch = 0;
  bool duplicate = false;
};
struct AbortRequired {};
using WriteOutcome = std::variant<WriteAck, AbortRequired>;

enum class FinalizeStatus { Applied, Duplicate, UnknownTxn };

struct FinalizeOutcome {
  FinalizeStatus status = FinalizeStatus::Applied;
  std::vector<Key> keys;
};

struct TxnFate {
  Decision decision = Decision::Abort;
  Epoch epoch = 0;
};

using FateLookup = std::function<std::optional<TxnFate>(const TxnId&)>;

/// Per-partition multi-version store: committed chains, write streams and
/// read trackers. Single-threaded; owned by a data node or a replica.
class PartitionStore {
 public:
  /// Primary read at `reader_ts`: advances the key's read tracker, then
  /// evaluates. Intents newer than the reader are skipped; an older
  /// undetermined intent above the newest visible version blocks the read.
  ReadEval read(Key key, const Timestamp& reader_ts, const TxnId& reader);

  /// Same rule without touching the read tracker (used to resume reads).
  ReadEval evaluate(Key key, const Timestamp& reader_ts, const TxnId& reader) const;

  /// Read inside an epoch view: versions assigned to epochs above `view` and
  /// intents logged after the view are invisible; resolved intents are visible
  /// iff committed with epoch <= view.
  ReadEval view_read(Key key, const Timestamp& ts_read, Epoch view, const FateLookup& known) const;

  WriteOutcome write(Key key, const TxnId& txn, const Timestamp& ts, Value value, PartitionId recorder,
                     Epoch current_epoch);

  FinalizeOutcome finalize(const TxnId& txn, Decision decision, Epoch commit_epoch);

  /// Replay path: install an intent without conflict checks.
  void apply_intent(Key key, WriteIntent intent);

  std::optional<TxnFate> fate(const TxnId& txn) const;
  bool has_intents(const TxnId& txn) const { return intents_by_txn_.count(txn) != 0; }

  /// Conservative read tracker applied to every key (data-node recovery).
  void set_read_floor(const Timestamp& floor) { read_floor_ = std::max(read_floor_, floor); }
  Timestamp read_floor() const { return read_floor_; }

  Timestamp read_tracker(Key key) const;
  const VersionChain* chain(Key key) const;
  std::size_t key_count() const { return chains_.size(); }
  std::size_t intent_count() const;

 private:
  std::unordered_map<Key, VersionChain> chains_;
  std::unordered_map<TxnId, std::vector<Key>> intents_by_txn_;
  std::unordered_map<TxnId, TxnFate> finalized_;
  Timestamp read_floor_{};
};

}  // namespace ttkv::mvto
