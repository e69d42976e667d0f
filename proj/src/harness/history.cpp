#include "ttkv/harness/history.hpp"

#include <algorithm>

namespace ttkv::harness {

const TxnHistory* History::find(const TxnId& t) const {
  auto it = index_.find(t);
  return it == index_.end() ? nullptr : &txns[it->second];
}

std::vector<const TxnHistory*> History::committed() const {
  std::vector<const TxnHistory*> out;
  for (const auto& t : txns)
    if (t.outcome == TxnOutcome::Committed) out.push_back(&t);
  return out;
}

History History::from_txns(std::vector<TxnHistory> txns, Nanos epoch_interval) {
  History h;
  h.header.epoch_interval = epoch_interval;
  h.txns = std::move(txns);
  for (std::size_t i = 0; i < h.txns.size(); ++i) h.index_[h.txns[i].id] = i;
  return h;
}

History History::from_trace(const trace::Trace& tr) {
  History h;
  h.header = tr.header;
  std::map<std::pair<std::uint64_t, std::string>, std::size_t> requests;
  std::unordered_map<std::uint64_t, Nanos> issued;

  auto txn = [&](const TxnId& id) -> TxnHistory& {
    auto [it, fresh] = h.index_.try_emplace(id, h.txns.size());
    if (fresh) {
      h.txns.emplace_back();
      h.txns.back().id = id;
    }
    return h.txns[it->second];
  };

  for (const trace::Event& e : tr.events) {
    h.end_of_trace = std::max(h.end_of_trace, e.at);
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, trace::TxnBegin>) {
            TxnHistory& t = txn(v.txn);
            t.tag = v.tag;
            t.begin = e.at;
          } else if constexpr (std::is_same_v<T, trace::TsAssigned>) {
            txn(v.txn).ts = v.ts;
          } else if constexpr (std::is_same_v<T, trace::ReadDone>) {
            txn(v.txn).reads.push_back(ObservedRead{v.index, v.key, v.writer, v.version});
          } else if constexpr (std::is_same_v<T, trace::WriteDone>) {
            txn(v.txn).writes.push_back(ObservedWrite{v.index, v.key, v.partition, v.proposed_epoch});
          } else if constexpr (std::is_same_v<T, trace::TxnCommitted>) {
            TxnHistory& t = txn(v.txn);
            t.end = e.at;
            t.reported_commit = true;
            if (v.epoch) t.commit_epoch = v.epoch;
          } else if constexpr (std::is_same_v<T, trace::TxnAborted>) {
            TxnHistory& t = txn(v.txn);
            t.end = e.at;
            t.reported_commit = false;
            t.abort_reason = v.reason;
          } else if constexpr (std::is_same_v<T, trace::RecordDecided>) {
            txn(v.txn).decisions.push_back(v);
          } else if constexpr (std::is_same_v<T, trace::WaitEdge>) {
            h.waits.push_back(WaitEdgeRecord{v.waiter, v.holder, e.at});
          } else if constexpr (std::is_same_v<T, trace::EpochCut>) {
            h.cuts.emplace_back(v.node, v.epoch, e.at);
          } else if constexpr (std::is_same_v<T, trace::ReplayedEpoch>) {
            h.replica_partition[v.node] = v.partition;
            auto& series = h.replayed[v.node];
            if (series.empty() || v.epoch > series.back().first) series.emplace_back(v.epoch, e.at);
          } else if constexpr (std::is_same_v<T, trace::ReplicaReqArrived>) {
            auto key = std::make_pair(v.read_id, v.node);
            if (!requests.count(key)) {
              requests[key] = h.replica_requests.size();
              h.replica_requests.push_back(ReplicaRequestTimes{v.read_id, v.node, e.at, {}, {}, 0});
            }
          } else if constexpr (std::is_same_v<T, trace::ReplicaReqReady>) {
            auto it = requests.find({v.read_id, v.node});
            if (it != requests.end() && !h.replica_requests[it->second].ready) h.replica_requests[it->second].ready = e.at;
          } else if constexpr (std::is_same_v<T, trace::ReplicaReqServed>) {
            auto it = requests.find({v.read_id, v.node});
            if (it != requests.end() && !h.replica_requests[it->second].served) {
              h.replica_requests[it->second].served = e.at;
              h.replica_requests[it->second].pushes = v.pushes;
            }
          } else if constexpr (std::is_same_v<T, trace::ReplicaReadIssued>) {
            issued.emplace(v.read_id, e.at);
          } else if constexpr (std::is_same_v<T, trace::ReplicaRead>) {
            ReplicaReadHistory r{v.read_id, v.reader, v.ts_read, v.view, v.keys, 0, e.at};
            if (auto it = issued.find(v.read_id); it != issued.end()) r.issued = it->second;
            h.replica_reads.push_back(std::move(r));
          } else if constexpr (std::is_same_v<T, trace::OracleIssued>) {
            h.oracle_issued.push_back(v);
            h.oracle_issued_at.push_back(e.at);
          }
        },
        e.body);
  }

  // Durable decisions are authoritative for transactions with writes; a
  // read-only transaction commits when its coordinator says so.
  for (TxnHistory& t : h.txns) {
    std::sort(t.reads.begin(), t.reads.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    std::sort(t.writes.begin(), t.writes.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    if (!t.decisions.empty()) {
      const auto& d = t.decisions.front();
      t.outcome = d.committed ? TxnOutcome::Committed : TxnOutcome::Aborted;
      if (d.committed) t.commit_epoch = d.epoch;
    } else if (t.reported_commit) {
      t.outcome = *t.reported_commit && !t.has_writes() ? TxnOutcome::Committed : TxnOutcome::Aborted;
      if (*t.reported_commit && t.has_writes()) t.outcome = TxnOutcome::Unknown;
    }
    if (t.outcome == TxnOutcome::Committed && !t.ts) t.outcome = TxnOutcome::Unknown;
  }
  return h;
}

}  // namespace ttkv::harness
