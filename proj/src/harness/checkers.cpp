#include "ttkv/harness/checkers.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ttkv::harness {

namespace {

std::string str(const std::optional<TxnId>& t) { return t ? t->to_string() : std::string("initial"); }

std::vector<const TxnHistory*> by_ts(const History& h) {
  std::vector<const TxnHistory*> out = h.committed();
  std::sort(out.begin(), out.end(), [](const TxnHistory* a, const TxnHistory* b) { return *a->ts < *b->ts; });
  return out;
}

struct ReplayFailure {
  std::size_t txn = 0;
  ObservedRead read;
  std::optional<TxnId> expected;
};

/// Replays `order` restricted to `alive`. Reads that observed a transaction
/// outside the live set are not checked.
std::optional<ReplayFailure> replay(const std::vector<const TxnHistory*>& order, const std::vector<char>& alive,
                                    const std::unordered_map<TxnId, std::size_t>& pos) {
  std::unordered_map<Key, TxnId> store;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!alive[i]) continue;
    const TxnHistory& t = *order[i];
    std::unordered_set<Key> own;
    std::size_t r = 0, w = 0;
    while (r < t.reads.size() || w < t.writes.size()) {
      bool take_read = w == t.writes.size() || (r < t.reads.size() && t.reads[r].index < t.writes[w].index);
      if (!take_read) {
        own.insert(t.writes[w++].key);
        continue;
      }
      const ObservedRead& rd = t.reads[r++];
      if (rd.writer && !(*rd.writer == t.id)) {
        auto p = pos.find(*rd.writer);
        if (p != pos.end() && !alive[p->second]) continue;
      }
      std::optional<TxnId> expected;
      if (own.count(rd.key)) {
        expected = t.id;
      } else if (auto s = store.find(rd.key); s != store.end()) {
        expected = s->second;
      }
      if (expected != rd.writer) return ReplayFailure{i, rd, expected};
    }
    for (Key k : own) store[k] = t.id;
  }
  return std::nullopt;
}

std::unordered_map<TxnId, std::size_t> positions(const std::vector<const TxnHistory*>& order) {
  std::unordered_map<TxnId, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]->id] = i;
  return pos;
}

bool conflict(const TxnHistory& a, const TxnHistory& b) {
  auto writes = [](const TxnHistory& t, Key k) {
    return std::any_of(t.writes.begin(), t.writes.end(), [k](const auto& w) { return w.key == k; });
  };
  auto touches = [&](const TxnHistory& t, Key k) {
    return writes(t, k) || std::any_of(t.reads.begin(), t.reads.end(), [k](const auto& r) { return r.key == k; });
  };
  for (const auto& w : a.writes)
    if (touches(b, w.key)) return true;
  for (const auto& w : b.writes)
    if (touches(a, w.key)) return true;
  return false;
}

}  // namespace

Verdict check_property1(const History& h) {
  Verdict v{"property1"};
  for (const TxnHistory* t : h.committed()) {
    if (!t->end) continue;
    ++v.checked;
    Nanos ts = t->ts->nanos;
    if (!(t->begin < ts && ts < *t->end)) {
      std::ostringstream os;
      os << t->id.to_string() << " begin " << t->begin << " ts " << ts << " end " << *t->end;
      v.fail(os.str());
      if (v.witness.empty()) v.witness.push_back(t->id);
    }
  }
  return v;
}

Verdict check_realtime_order(const History& h) {
  Verdict v{"realtime_order"};
  std::vector<const TxnHistory*> ended, all = h.committed();
  for (const TxnHistory* t : all)
    if (t->end) ended.push_back(t);
  std::sort(ended.begin(), ended.end(), [](auto a, auto b) { return *a->end < *b->end; });
  std::sort(all.begin(), all.end(), [](auto a, auto b) { return a->begin < b->begin; });
  std::size_t j = 0;
  const TxnHistory* best = nullptr;
  for (const TxnHistory* b : all) {
    while (j < ended.size() && *ended[j]->end < b->begin) {
      if (!best || *best->ts < *ended[j]->ts) best = ended[j];
      ++j;
    }
    ++v.checked;
    if (best && !(*best->ts < *b->ts)) {
      v.fail(best->id.to_string() + " ended before " + b->id.to_string() + " began but has ts " +
             best->ts->to_string() + " >= " + b->ts->to_string());
      if (v.witness.empty()) v.witness = {best->id, b->id};
    }
  }
  return v;
}

Verdict check_serial_replay(const History& h) {
  Verdict v{"serial_replay"};
  auto order = by_ts(h);
  auto pos = positions(order);
  std::vector<char> alive(order.size(), 1);
  v.checked = order.size();
  // Count every failing read, not only the first.
  std::unordered_map<Key, TxnId> store;
  auto first = replay(order, alive, pos);
  if (!first) return v;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const TxnHistory& t = *order[i];
    std::unordered_set<Key> own;
    std::size_t r = 0, w = 0;
    while (r < t.reads.size() || w < t.writes.size()) {
      bool take_read = w == t.writes.size() || (r < t.reads.size() && t.reads[r].index < t.writes[w].index);
      if (!take_read) {
        own.insert(t.writes[w++].key);
        continue;
      }
      const ObservedRead& rd = t.reads[r++];
      std::optional<TxnId> expected;
      if (own.count(rd.key)) {
        expected = t.id;
      } else if (auto s = store.find(rd.key); s != store.end()) {
        expected = s->second;
      }
      if (expected != rd.writer) {
        v.fail(t.id.to_string() + " read key " + std::to_string(rd.key) + " from " + str(rd.writer) +
               ", timestamp-order replay gives " + str(expected));
      }
    }
    for (Key k : own) store[k] = t.id;
  }
  return v;
}

Verdict check_strict_serializability(const History& h, std::size_t shrink_steps) {
  Verdict rt = check_realtime_order(h);
  Verdict sr = check_serial_replay(h);
  Verdict v{"strict_serializability"};
  v.checked = sr.checked;
  v.violations = rt.violations + sr.violations;
  v.pass = rt.pass && sr.pass;
  if (!rt.pass) {
    v.detail = "(a) " + rt.detail;
    v.witness = rt.witness;
    return v;
  }
  if (sr.pass) return v;
  v.detail = "(b) " + sr.detail;

  // Greedy chunked shrinking of the live transaction set.
  auto order = by_ts(h);
  auto pos = positions(order);
  std::vector<char> alive(order.size(), 1);
  auto fails = [&] { return replay(order, alive, pos).has_value(); };
  auto f = replay(order, alive, pos);
  for (std::size_t i = f->txn + 1; i < order.size(); ++i) alive[i] = 0;
  std::size_t steps = 0;
  for (std::size_t chunk = std::max<std::size_t>(1, (f->txn + 1) / 2);; chunk /= 2) {
    for (std::size_t start = 0; start <= f->txn && steps < shrink_steps; start += chunk) {
      std::vector<std::size_t> flipped;
      for (std::size_t i = start; i < std::min(start + chunk, f->txn + 1); ++i)
        if (alive[i]) {
          alive[i] = 0;
          flipped.push_back(i);
        }
      if (flipped.empty()) continue;
      ++steps;
      if (!fails())
        for (std::size_t i : flipped) alive[i] = 1;
    }
    if (chunk == 1 || steps >= shrink_steps) break;
  }
  for (std::size_t i = 0; i < order.size(); ++i)
    if (alive[i]) v.witness.push_back(order[i]->id);
  return v;
}

bool brute_force_serializable(const History& h) {
  std::vector<const TxnHistory*> txns = h.committed();
  const std::size_t n = txns.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (txns[a]->end && *txns[a]->end < txns[b]->begin && !(*txns[a]->ts < *txns[b]->ts)) return false;

  // before[a][b]: a must precede b.
  std::vector<std::vector<char>> before(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (txns[a]->end && *txns[a]->end < txns[b]->begin) before[a][b] = 1;
      if (conflict(*txns[a], *txns[b]) && *txns[a]->ts < *txns[b]->ts) before[a][b] = 1;
    }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> alive(n, 1);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if (before[perm[j]][perm[i]]) ok = false;
    if (!ok) continue;
    std::vector<const TxnHistory*> order;
    for (std::size_t i : perm) order.push_back(txns[i]);
    if (!replay(order, alive, positions(order))) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

Verdict check_replica_consistency(const History& h) {
  Verdict v{"replica_consistency"};
  struct W {
    Timestamp ts;
    Epoch epoch;
    const TxnHistory* txn;
  };
  std::unordered_map<Key, std::vector<W>> writers;
  for (const TxnHistory* t : h.committed()) {
    std::set<Key> keys;
    for (const auto& w : t->writes) keys.insert(w.key);
    for (Key k : keys) writers[k].push_back(W{*t->ts, t->commit_epoch.value_or(0), t});
  }
  for (auto& [k, ws] : writers) std::sort(ws.begin(), ws.end(), [](const W& a, const W& b) { return a.ts < b.ts; });

  const Nanos interval = h.header.epoch_interval;
  std::uint64_t bad_view = 0, bad_snapshot = 0, bad_atomic = 0, bad_inv3 = 0;
  for (const ReplicaReadHistory& r : h.replica_reads) {
    ++v.checked;
    const std::string who = "replica read " + std::to_string(r.read_id) + " (view " + std::to_string(r.view) + ")";
    if (interval > 0 && r.view != (r.ts_read.nanos + interval - 1) / interval) {
      ++bad_view;
      v.fail(who + " view is not the ceiling epoch of " + r.ts_read.to_string());
    }
    std::map<Key, std::optional<Timestamp>> seen;
    std::map<TxnId, const TxnHistory*> observed;
    for (const trace::KeyRead& kr : r.keys) {
      seen[kr.key] = kr.version;
      std::optional<TxnId> expected;
      if (auto it = writers.find(kr.key); it != writers.end()) {
        for (auto w = it->second.rbegin(); w != it->second.rend(); ++w)
          if (w->ts < r.ts_read && w->epoch <= r.view) {
            expected = w->txn->id;
            break;
          }
      }
      if (expected != kr.writer) {
        ++bad_snapshot;
        v.fail(who + " key " + std::to_string(kr.key) + " observed " + str(kr.writer) + ", snapshot has " +
               str(expected));
      }
      if (kr.writer) {
        if (const TxnHistory* t = h.find(*kr.writer)) observed[t->id] = t;
      }
    }
    Nanos latest_begin = 0;
    for (const auto& [id, t] : observed) {
      latest_begin = std::max(latest_begin, t->begin);
      for (const auto& w : t->writes) {
        auto s = seen.find(w.key);
        if (s == seen.end()) continue;
        if (!s->second || *s->second < *t->ts) {
          ++bad_atomic;
          v.fail(who + " observed part of " + id.to_string() + " but not its write of key " + std::to_string(w.key));
        }
      }
    }
    for (const auto& [key, version] : seen) {
      auto it = writers.find(key);
      if (it == writers.end()) continue;
      for (const W& w : it->second) {
        if (!w.txn->end || *w.txn->end >= latest_begin) continue;
        if (!version || *version < w.ts) {
          ++bad_inv3;
          v.fail(who + " observed a writer that began after " + w.txn->id.to_string() + " ended, but not its key " +
                 std::to_string(key));
          break;
        }
      }
    }
  }
  std::ostringstream os;
  os << " [view " << bad_view << ", snapshot " << bad_snapshot << ", atomic " << bad_atomic << ", inv3 " << bad_inv3
     << "]";
  v.detail += os.str();
  return v;
}

Verdict check_deadlock_freedom(const History& h) {
  Verdict v{"deadlock_freedom"};
  std::map<std::string, std::set<std::string>> g;
  for (const auto& e : h.waits) {
    g[e.waiter].insert(e.holder.to_string());
    ++v.checked;
  }
  // Iterative three-colour DFS; each back edge closes a cycle.
  std::map<std::string, int> colour;
  for (const auto& [root, _] : g) {
    if (colour[root]) continue;
    std::vector<std::pair<std::string, std::set<std::string>::const_iterator>> stack;
    colour[root] = 1;
    stack.emplace_back(root, g[root].cbegin());
    while (!stack.empty()) {
      auto& [node, it] = stack.back();
      const auto& succ = g[node];
      if (it == succ.cend()) {
        colour[node] = 2;
        stack.pop_back();
        continue;
      }
      const std::string next = *it++;
      int c = colour[next];
      if (c == 1) {
        v.fail("waits-for cycle through " + node + " -> " + next);
      } else if (c == 0) {
        colour[next] = 1;
        stack.emplace_back(next, g[next].cbegin());
      }
    }
  }
  return v;
}

Verdict check_property2(const History& h) {
  Verdict v{"property2"};
  for (const auto& [node, epoch, at] : h.cuts) {
    ++v.checked;
    if (!(at > epoch * h.header.epoch_interval))
      v.fail(node + " cut epoch " + std::to_string(epoch) + " at " + std::to_string(at) + ", promised end " +
             std::to_string(epoch * h.header.epoch_interval));
  }
  return v;
}

Verdict check_durability(const History& h) {
  Verdict v{"durability"};
  auto committed = [&](const TxnId& id) {
    const TxnHistory* t = h.find(id);
    return t && t->outcome == TxnOutcome::Committed;
  };
  for (const TxnHistory& t : h.txns) {
    ++v.checked;
    const std::string id = t.id.to_string();
    if (t.decisions.size() > 1) v.fail(id + " has " + std::to_string(t.decisions.size()) + " durable decisions");
    if (t.has_writes() && t.decisions.empty()) v.fail(id + " wrote but has no durable decision");
    if (t.reported_commit && !t.decisions.empty()) {
      const auto& d = t.decisions.front();
      if (*t.reported_commit != d.committed)
        v.fail(id + " reported " + (*t.reported_commit ? "commit" : "abort") + " but decided otherwise");
      if (*t.reported_commit && t.commit_epoch && *t.commit_epoch != d.epoch)
        v.fail(id + " reported commit epoch differs from the durable one");
    }
    if (t.reported_commit && *t.reported_commit && t.has_writes() && t.decisions.empty())
      v.fail(id + " reported commit without a durable decision");
    for (const auto& r : t.reads)
      if (r.writer && !(*r.writer == t.id) && !committed(*r.writer))
        v.fail(id + " read a version of " + r.writer->to_string() + ", which did not commit");
  }
  for (const ReplicaReadHistory& r : h.replica_reads)
    for (const auto& k : r.keys)
      if (k.writer && !committed(*k.writer))
        v.fail("replica read " + std::to_string(r.read_id) + " observed " + k.writer->to_string() +
               ", which did not commit");
  return v;
}

Verdict check_oracle(const History& h) {
  Verdict v{"oracle"};
  std::map<ServerId, Nanos> last;
  for (std::size_t i = 0; i < h.oracle_issued.size(); ++i) {
    const auto& o = h.oracle_issued[i];
    const Nanos at = h.oracle_issued_at[i];
    ++v.checked;
    if (!(o.earliest <= at && at <= o.latest)) v.fail("oracle " + std::to_string(o.server) + " interval misses true time");
    auto it = last.find(o.server);
    if (it != last.end() && o.latest <= it->second)
      v.fail("oracle " + std::to_string(o.server) + " latest bound did not increase");
    last[o.server] = o.latest;
  }
  return v;
}

std::vector<Verdict> check_all(const History& h) {
  return {check_property1(h),   check_strict_serializability(h), check_replica_consistency(h),
          check_deadlock_freedom(h), check_property2(h),          check_durability(h),
          check_oracle(h)};
}

}  // namespace ttkv::harness
