#include <gtest/gtest.h>

#include <numeric>

#include "../support/random_histories.hpp"
#include "ttkv/harness/checkers.hpp"

using namespace ttkv;
using namespace ttkv::harness;

namespace {

TxnHistory txn(NodeId id, Nanos ts, Nanos begin, Nanos end) {
  TxnHistory t;
  t.id = TxnId{id, 0, 1};
  t.ts = Timestamp{ts, 0, 0};
  t.begin = begin;
  t.end = end;
  t.outcome = TxnOutcome::Committed;
  t.reported_commit = true;
  return t;
}

void write(TxnHistory& t, Key k, Epoch e = 1) {
  t.writes.push_back(ObservedWrite{static_cast<std::uint32_t>(t.reads.size() + t.writes.size()), k, 0, e});
}

void read(TxnHistory& t, Key k, const TxnHistory* from) {
  ObservedRead r{static_cast<std::uint32_t>(t.reads.size() + t.writes.size()), k, std::nullopt, std::nullopt};
  if (from) {
    r.writer = from->id;
    r.version = from->ts;
  }
  t.reads.push_back(r);
}

void decided(TxnHistory& t, bool committed, Epoch e = 1) {
  t.decisions.push_back(trace::RecordDecided{t.id, "rec.0.a", committed, e});
  t.commit_epoch = e;
}

// Any serial order consistent with real time reproduces every read.
bool serializable_any_order(const History& h) {
  auto txns = h.committed();
  std::vector<std::size_t> perm(txns.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size() && ok; ++i)
      for (std::size_t j = i + 1; j < perm.size() && ok; ++j) {
        const auto* a = txns[perm[i]];
        const auto* b = txns[perm[j]];
        if (b->end && *b->end < a->begin) ok = false;
      }
    if (!ok) continue;
    std::map<Key, std::optional<TxnId>> store;
    for (std::size_t i : perm) {
      const auto* t = txns[i];
      std::map<Key, bool> own;
      std::size_t w = 0;
      for (const auto& r : t->reads) {
        while (w < t->writes.size() && t->writes[w].index < r.index) own[t->writes[w++].key] = true;
        std::optional<TxnId> expect = own.count(r.key) ? std::optional<TxnId>(t->id) : store[r.key];
        if (expect != r.writer) ok = false;
      }
      for (const auto& wr : t->writes) store[wr.key] = t->id;
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST(StrictSerializability, ReversedTimestampsFailRealTime) {
  auto a = txn(1, 200, 10, 20);
  auto b = txn(2, 100, 30, 40);
  auto h = History::from_txns({a, b});
  EXPECT_FALSE(check_realtime_order(h).pass);
  EXPECT_TRUE(check_serial_replay(h).pass);
  auto v = check_strict_serializability(h);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(brute_force_serializable(h));
}

TEST(StrictSerializability, LostUpdateFailsReplay) {
  // Both read the initial value of x and both write x.
  auto a = txn(1, 100, 0, 50);
  auto b = txn(2, 200, 0, 60);
  read(a, 1, nullptr);
  write(a, 1);
  read(b, 1, nullptr);
  write(b, 1);
  auto h = History::from_txns({a, b});
  EXPECT_TRUE(check_realtime_order(h).pass);
  auto v = check_serial_replay(h);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.violations, 1u);
  auto ss = check_strict_serializability(h);
  EXPECT_FALSE(ss.pass);
  ASSERT_EQ(ss.witness.size(), 2u);
  EXPECT_FALSE(brute_force_serializable(h));
}

TEST(StrictSerializability, ConcurrentThreeTxnHistoryPasses) {
  auto a = txn(1, 100, 0, 300);
  auto b = txn(2, 200, 50, 250);
  auto c = txn(3, 300, 260, 400);
  write(a, 1);
  read(b, 1, &a);
  write(b, 2);
  read(c, 2, &b);
  read(c, 1, &a);
  auto h = History::from_txns({a, b, c});
  EXPECT_TRUE(check_strict_serializability(h).pass);
  EXPECT_TRUE(brute_force_serializable(h));
  EXPECT_TRUE(serializable_any_order(h));
}

TEST(StrictSerializability, ReadingAbortedWriteFails) {
  auto a = txn(1, 100, 0, 50);
  a.outcome = TxnOutcome::Aborted;
  write(a, 1);
  auto b = txn(2, 200, 60, 90);
  read(b, 1, &a);
  auto h = History::from_txns({a, b});
  EXPECT_FALSE(check_serial_replay(h).pass);
  EXPECT_FALSE(brute_force_serializable(h));
}

TEST(StrictSerializability, ShrinkFindsSmallWitness) {
  std::vector<TxnHistory> txns;
  for (NodeId i = 1; i <= 30; ++i) {
    auto t = txn(i, i * 100, i * 1000, i * 1000 + 500);
    write(t, 100 + i);
    txns.push_back(t);
  }
  auto x = txn(50, 5000, 0, 99999);
  auto y = txn(51, 6000, 0, 99999);
  write(x, 7);
  read(y, 7, nullptr);  // should have seen x
  txns.push_back(x);
  txns.push_back(y);
  auto v = check_strict_serializability(History::from_txns(txns));
  ASSERT_FALSE(v.pass);
  EXPECT_LE(v.witness.size(), 2u);
}

TEST(StrictSerializability, BruteForceAgreesOnRandomHistories) {
  std::mt19937_64 rng(99);
  int pass = 0, fail = 0;
  for (int i = 0; i < 500; ++i) {
    auto h = ttkv::testing::random_history(rng);
    bool replay = check_strict_serializability(h).pass;
    ASSERT_EQ(replay, brute_force_serializable(h)) << "history " << i;
    (replay ? pass : fail)++;
  }
  EXPECT_GT(pass, 50);
  EXPECT_GT(fail, 50);
}

TEST(StrictSerializability, TimestampOrderIsStricterThanAnyOrder) {
  // Serializable as b, a, but the timestamps say a, b.
  auto a = txn(1, 100, 0, 50);
  auto b = txn(2, 200, 0, 50);
  read(a, 1, &b);
  write(b, 1);
  auto h = History::from_txns({a, b});
  EXPECT_TRUE(serializable_any_order(h));
  EXPECT_FALSE(brute_force_serializable(h));
  EXPECT_FALSE(check_strict_serializability(h).pass);
}

TEST(Property1, DetectsEarlyRelease) {
  auto ok = txn(1, 100, 50, 150);
  auto bad = txn(2, 300, 100, 300);
  auto h = History::from_txns({ok, bad});
  auto v = check_property1(h);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.checked, 2u);
  EXPECT_EQ(v.violations, 1u);
  EXPECT_EQ(v.witness.front(), bad.id);
}

namespace {

History with_reads(std::vector<TxnHistory> txns, std::vector<ReplicaReadHistory> reads) {
  auto h = History::from_txns(std::move(txns), 100);
  h.replica_reads = std::move(reads);
  return h;
}

trace::KeyRead kr(Key k, const TxnHistory* t) {
  if (!t) return trace::KeyRead{k, std::nullopt, std::nullopt};
  return trace::KeyRead{k, t->ts, t->id};
}

}  // namespace

TEST(ReplicaConsistency, AtomicVisibility) {
  auto t = txn(1, 50, 10, 60);
  write(t, 1);
  write(t, 2);
  t.commit_epoch = 1;
  ReplicaReadHistory good{1, "reader.SH", Timestamp{150}, 2, {kr(1, &t), kr(2, &t)}};
  ReplicaReadHistory early{2, "reader.SH", Timestamp{40}, 1, {kr(1, nullptr), kr(2, nullptr)}};
  EXPECT_TRUE(check_replica_consistency(with_reads({t}, {good, early})).pass);

  ReplicaReadHistory torn{3, "reader.SH", Timestamp{150}, 2, {kr(1, &t), kr(2, nullptr)}};
  auto v = check_replica_consistency(with_reads({t}, {torn}));
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("atomic 1"), std::string::npos) << v.detail;
}

TEST(ReplicaConsistency, ViewHidesLaterEpochs) {
  auto t = txn(1, 50, 10, 60);
  write(t, 1);
  t.commit_epoch = 3;
  ReplicaReadHistory r{1, "reader.SH", Timestamp{150}, 2, {kr(1, nullptr)}};
  EXPECT_TRUE(check_replica_consistency(with_reads({t}, {r})).pass);
  r.keys = {kr(1, &t)};
  EXPECT_FALSE(check_replica_consistency(with_reads({t}, {r})).pass);
  ReplicaReadHistory wrong_view{2, "reader.SH", Timestamp{150}, 3, {kr(1, &t)}};
  auto v = check_replica_consistency(with_reads({t}, {wrong_view}));
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("view 1"), std::string::npos) << v.detail;
}

TEST(ReplicaConsistency, Invariant3) {
  auto t1 = txn(1, 50, 10, 60);
  write(t1, 1);
  t1.commit_epoch = 2;
  auto t2 = txn(2, 120, 100, 130);
  write(t2, 2);
  t2.commit_epoch = 2;
  ReplicaReadHistory r{1, "reader.SH", Timestamp{190}, 2, {kr(1, nullptr), kr(2, &t2)}};
  auto v = check_replica_consistency(with_reads({t1, t2}, {r}));
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("inv3 1"), std::string::npos) << v.detail;
  r.keys = {kr(1, &t1), kr(2, &t2)};
  EXPECT_TRUE(check_replica_consistency(with_reads({t1, t2}, {r})).pass);
}

TEST(Deadlock, DetectsCycle) {
  History h;
  TxnId a{1, 0, 1}, b{2, 0, 1};
  h.waits = {{"rread:1", a, 0}, {a.to_string(), b, 0}};
  EXPECT_TRUE(check_deadlock_freedom(h).pass);
  h.waits.push_back({b.to_string(), a, 0});
  EXPECT_FALSE(check_deadlock_freedom(h).pass);
}

TEST(Property2, CutMustFollowPromise) {
  History h;
  h.header.epoch_interval = 100;
  h.cuts = {{"data.0", 1, 101}, {"data.0", 2, 250}};
  EXPECT_TRUE(check_property2(h).pass);
  h.cuts.push_back({"data.1", 3, 300});
  auto v = check_property2(h);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.checked, 3u);
}

TEST(Durability, OneDecisionPerWriter) {
  auto t = txn(1, 100, 0, 200);
  write(t, 1);
  EXPECT_FALSE(check_durability(History::from_txns({t})).pass);
  decided(t, true);
  EXPECT_TRUE(check_durability(History::from_txns({t})).pass);
  auto twice = t;
  decided(twice, true);
  EXPECT_FALSE(check_durability(History::from_txns({twice})).pass);
  auto flipped = t;
  flipped.reported_commit = false;
  EXPECT_FALSE(check_durability(History::from_txns({flipped})).pass);
}

TEST(Durability, ReaderMustNotSeeAbortedWrite) {
  auto a = txn(1, 100, 0, 50);
  write(a, 1);
  decided(a, false);
  a.outcome = TxnOutcome::Aborted;
  a.reported_commit = false;
  auto h = with_reads({a}, {ReplicaReadHistory{1, "reader.SH", Timestamp{150}, 2, {kr(1, &a)}}});
  EXPECT_FALSE(check_durability(h).pass);
}
