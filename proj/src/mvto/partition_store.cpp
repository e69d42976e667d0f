#include "ttkv/mvto/partition_store.hpp"

#include <algorithm>

namespace ttkv::mvto {

namespace {

// Walk committed versions and intents at or below `limit`, newest first.
// `classify_intent` returns the visibility of an intent: 1 visible, 0
// invisible, -1 unknown (blocks). Committed versions use `version_visible`.
template <class IntentFn, class VersionFn>
ReadEval scan(const VersionChain& chain, const Timestamp& limit, IntentFn classify_intent,
              VersionFn version_visible) {
  ReadEval out;
  auto c_it = chain.committed.upper_bound(limit);
  auto i_it = chain.write_stream.upper_bound(limit);
  while (true) {
    bool c_left = c_it != chain.committed.begin();
    bool i_left = i_it != chain.write_stream.begin();
    if (!c_left && !i_left) break;
    bool take_intent;
    if (!c_left) {
      take_intent = true;
    } else if (!i_left) {
      take_intent = false;
    } else {
      take_intent = std::prev(i_it)->first > std::prev(c_it)->first;
    }
    if (take_intent) {
      --i_it;
      const WriteIntent& intent = i_it->second;
      int vis = classify_intent(intent);
      if (vis > 0) {
        out.result.value = intent.value;
        out.result.version_ts = intent.ts;
        out.result.writer = intent.txn;
        break;
      }
      if (vis < 0) out.blockers.push_back(Blocker{intent.txn, intent.recorder, intent.ts});
    } else {
      --c_it;
      if (version_visible(c_it->second)) {
        out.result.value = c_it->second.value;
        out.result.version_ts = c_it->first;
        out.result.writer = c_it->second.txn;
        break;
      }
    }
  }
  out.ready = out.blockers.empty();
  if (!out.ready) out.result = ReadResult{};
  return out;
}

}  // namespace

ReadEval PartitionStore::read(Key key, const Timestamp& reader_ts, const TxnId& reader) {
  VersionChain& chain = chains_[key];
  chain.read_tracker = std::max(chain.read_tracker, reader_ts);
  return evaluate(key, reader_ts, reader);
}

ReadEval PartitionStore::evaluate(Key key, const Timestamp& reader_ts, const TxnId& reader) const {
  auto it = chains_.find(key);
  if (it == chains_.end()) return ReadEval{true, {}, {}};
  return scan(
      it->second, reader_ts,
      [&](const WriteIntent& intent) {
        if (intent.txn == reader) return 1;  // read-your-writes
        return -1;
      },
      [](const Version& v) { return v.visible; });
}

ReadEval PartitionStore::view_read(Key key, const Timestamp& ts_read, Epoch view,
                                   const FateLookup& known) const {
  auto it = chains_.find(key);
  if (it == chains_.end()) return ReadEval{true, {}, {}};
  return scan(
      it->second, ts_read,
      [&](const WriteIntent& intent) {
        if (intent.logged_epoch > view) return 0;
        std::optional<TxnFate> f = fate(intent.txn);
        if (!f && known) f = known(intent.txn);
        if (!f) return -1;
        return (f->decision == Decision::Commit && f->epoch <= view) ? 1 : 0;
      },
      [&](const Version& v) { return v.visible && v.epoch <= view; });
}

WriteOutcome PartitionStore::write(Key key, const TxnId& txn, const Timestamp& ts, Value value,
                                   PartitionId recorder, Epoch current_epoch) {
  if (auto f = finalized_.find(txn); f != finalized_.end()) {
    if (f->second.decision == Decision::Abort) return AbortRequired{};
    return WriteAck{current_epoch, true};
  }
  VersionChain& chain = chains_[key];
  if (auto i = chain.write_stream.find(ts); i != chain.write_stream.end() && i->second.txn == txn) {
    if (i->second.value == value) return WriteAck{i->second.logged_epoch, true};
    // A later write of the same transaction to the same key replaces its value.
    i->second.value = std::move(value);
    i->second.logged_epoch = current_epoch;
    return WriteAck{current_epoch, false};
  }
  if (ts < std::max(chain.read_tracker, read_floor_)) return AbortRequired{};
  chain.write_stream[ts] = WriteIntent{txn, ts, std::move(value), recorder, current_epoch};
  auto& keys = intents_by_txn_[txn];
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  return WriteAck{current_epoch, false};
}

FinalizeOutcome PartitionStore::finalize(const TxnId& txn, Decision decision, Epoch commit_epoch) {
  FinalizeOutcome out;
  if (finalized_.count(txn)) {
    out.status = FinalizeStatus::Duplicate;
    return out;
  }
  TxnFate fate{decision, decision == Decision::Commit ? commit_epoch : 0};
  finalized_[txn] = fate;
  auto it = intents_by_txn_.find(txn);
  if (it == intents_by_txn_.end()) {
    out.status = FinalizeStatus::UnknownTxn;
    return out;
  }
  out.keys = std::move(it->second);
  intents_by_txn_.erase(it);
  for (Key key : out.keys) {
    VersionChain& chain = chains_[key];
    for (auto i = chain.write_stream.begin(); i != chain.write_stream.end();) {
      if (i->second.txn == txn) {
        chain.committed[i->first] =
            Version{txn, std::move(i->second.value), fate.epoch, decision == Decision::Commit};
        i = chain.write_stream.erase(i);
      } else {
        ++i;
      }
    }
  }
  out.status = FinalizeStatus::Applied;
  return out;
}

void PartitionStore::apply_intent(Key key, WriteIntent intent) {
  if (finalized_.count(intent.txn)) return;
  VersionChain& chain = chains_[key];
  auto& keys = intents_by_txn_[intent.txn];
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  Timestamp ts = intent.ts;
  chain.write_stream[ts] = std::move(intent);
}

std::optional<TxnFate> PartitionStore::fate(const TxnId& txn) const {
  auto it = finalized_.find(txn);
  if (it == finalized_.end()) return std::nullopt;
  return it->second;
}

Timestamp PartitionStore::read_tracker(Key key) const {
  auto it = chains_.find(key);
  Timestamp rt = it == chains_.end() ? Timestamp{} : it->second.read_tracker;
  return std::max(rt, read_floor_);
}

const VersionChain* PartitionStore::chain(Key key) const {
  auto it = chains_.find(key);
  return it == chains_.end() ? nullptr : &it->second;
}

std::size_t PartitionStore::intent_count() const {
  std::size_t n = 0;
  for (const auto& [k, c] : chains_) n += c.write_stream.size();
  return n;
}

}  // namespace ttkv::mvto
