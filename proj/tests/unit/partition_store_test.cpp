#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ttkv/mvto/partition_store.hpp"

using namespace ttkv;
using namespace ttkv::mvto;

namespace {

Timestamp T(Nanos n) { return Timestamp{n, 0, 0}; }
TxnId X(std::uint64_t n) { return TxnId{1, 0, n}; }
const TxnId kReader{99, 0, 1};

void commit(PartitionStore& s, Key k, std::uint64_t txn, Nanos ts, const char* v, Epoch e = 1) {
  ASSERT_TRUE(std::holds_alternative<WriteAck>(s.write(k, X(txn), T(ts), v, 0, e)));
  ASSERT_EQ(s.finalize(X(txn), Decision::Commit, e).status, FinalizeStatus::Applied);
}

}  // namespace

TEST(PartitionStore, SnapshotRead) {
  PartitionStore s;
  commit(s, 1, 1, 10, "a");
  commit(s, 1, 2, 30, "b");
  auto r = s.read(1, T(20), kReader);
  ASSERT_TRUE(r.ready);
  EXPECT_EQ(r.result.value, "a");
  EXPECT_EQ(r.result.version_ts, T(10));
}

TEST(PartitionStore, AbsentKeyAdvancesTracker) {
  PartitionStore s;
  auto r = s.read(5, T(40), kReader);
  EXPECT_TRUE(r.ready);
  EXPECT_FALSE(r.result.value);
  EXPECT_EQ(s.read_tracker(5), T(40));
  EXPECT_TRUE(std::holds_alternative<AbortRequired>(s.write(5, X(1), T(30), "x", 0, 1)));
}

TEST(PartitionStore, NewerIntentIsSkipped) {
  PartitionStore s;
  commit(s, 1, 1, 10, "a");
  s.write(1, X(2), T(50), "w", 0, 1);
  auto r = s.read(1, T(40), kReader);
  ASSERT_TRUE(r.ready);
  EXPECT_EQ(r.result.value, "a");
}

TEST(PartitionStore, OlderIntentBlocksUntilResolved) {
  PartitionStore s;
  commit(s, 1, 1, 10, "a");
  s.write(1, X(2), T(50), "w", 7, 1);
  auto r = s.read(1, T(60), kReader);
  ASSERT_FALSE(r.ready);
  ASSERT_EQ(r.blockers.size(), 1u);
  EXPECT_EQ(r.blockers[0].txn, X(2));
  EXPECT_EQ(r.blockers[0].recorder, 7u);

  PartitionStore committed = s;
  committed.finalize(X(2), Decision::Commit, 4);
  auto c = committed.evaluate(1, T(60), kReader);
  ASSERT_TRUE(c.ready);
  EXPECT_EQ(c.result.value, "w");
  EXPECT_EQ(c.result.version_ts, T(50));

  s.finalize(X(2), Decision::Abort, 0);
  auto a = s.evaluate(1, T(60), kReader);
  ASSERT_TRUE(a.ready);
  EXPECT_EQ(a.result.value, "a");
}

TEST(PartitionStore, ReadTrackerRule) {
  PartitionStore s;
  s.read(1, T(70), kReader);
  EXPECT_TRUE(std::holds_alternative<AbortRequired>(s.write(1, X(1), T(60), "x", 0, 1)));
  EXPECT_TRUE(std::holds_alternative<WriteAck>(s.write(1, X(2), T(80), "y", 0, 1)));
}

TEST(PartitionStore, WriteWriteCoexist) {
  PartitionStore s;
  s.write(1, X(1), T(90), "late", 0, 1);
  auto r = s.write(1, X(2), T(80), "early", 0, 2);
  ASSERT_TRUE(std::holds_alternative<WriteAck>(r));
  EXPECT_EQ(std::get<WriteAck>(r).proposed_epoch, 2u);
  EXPECT_EQ(s.chain(1)->write_stream.size(), 2u);
}

TEST(PartitionStore, BlindWritesNeverAbort) {
  PartitionStore s;
  std::mt19937_64 rng(3);
  for (std::uint64_t i = 0; i < 5000; ++i) {
    Nanos ts = rng() % 1'000'000 + 1;
    auto r = s.write(rng() % 16, X(i), Timestamp{ts, 0, static_cast<NodeId>(i)}, "v", 0, 1);
    ASSERT_TRUE(std::holds_alternative<WriteAck>(r));
    if (i % 3 == 0) s.finalize(X(i), i % 2 ? Decision::Commit : Decision::Abort, 1);
  }
}

TEST(PartitionStore, FinalizeCommitTagsEpoch) {
  PartitionStore s;
  s.write(1, X(1), T(50), "v", 0, 1);
  s.finalize(X(1), Decision::Commit, 4);
  const auto* c = s.chain(1);
  ASSERT_EQ(c->committed.count(T(50)), 1u);
  EXPECT_EQ(c->committed.at(T(50)).epoch, 4u);
  EXPECT_TRUE(c->committed.at(T(50)).visible);
  EXPECT_TRUE(c->write_stream.empty());
}

TEST(PartitionStore, AbortMarksInvisible) {
  PartitionStore s;
  s.write(1, X(1), T(50), "v", 0, 1);
  s.finalize(X(1), Decision::Abort, 0);
  EXPECT_FALSE(s.chain(1)->committed.at(T(50)).visible);
  auto r = s.read(1, T(60), kReader);
  ASSERT_TRUE(r.ready);
  EXPECT_FALSE(r.result.value);
}

TEST(PartitionStore, DuplicateAndUnknownFinalize) {
  PartitionStore s;
  s.write(1, X(1), T(50), "v", 0, 1);
  EXPECT_EQ(s.finalize(X(1), Decision::Commit, 2).status, FinalizeStatus::Applied);
  EXPECT_EQ(s.finalize(X(1), Decision::Commit, 2).status, FinalizeStatus::Duplicate);
  EXPECT_EQ(s.finalize(X(9), Decision::Abort, 0).status, FinalizeStatus::UnknownTxn);
  // The tombstone turns a late write of the aborted transaction into an abort.
  EXPECT_TRUE(std::holds_alternative<AbortRequired>(s.write(2, X(9), T(70), "z", 0, 1)));
}

TEST(PartitionStore, SnapshotIndependentOfFinalizeOrder) {
  std::vector<std::pair<std::uint64_t, Decision>> fin;
  PartitionStore base;
  commit(base, 1, 100, 5, "base");
  for (std::uint64_t i = 1; i <= 6; ++i) {
    base.write(1, X(i), T(100 + 10 * i), "v" + std::to_string(i), 0, 1);
    fin.emplace_back(i, i % 2 ? Decision::Commit : Decision::Abort);
  }
  auto before = base.evaluate(1, T(100), kReader);
  ASSERT_TRUE(before.ready);
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    PartitionStore s = base;
    std::shuffle(fin.begin(), fin.end(), rng);
    for (std::size_t j = 0; j < fin.size(); ++j) {
      s.finalize(X(fin[j].first), fin[j].second, 1);
      auto r = s.evaluate(1, T(100), kReader);
      ASSERT_TRUE(r.ready);
      EXPECT_EQ(r.result, before.result);
    }
  }
}

TEST(PartitionStore, ReadYourWrites) {
  PartitionStore s;
  s.write(1, X(1), T(50), "mine", 0, 1);
  auto r = s.read(1, T(50), X(1));
  ASSERT_TRUE(r.ready);
  EXPECT_EQ(r.result.value, "mine");
}

TEST(PartitionStore, ViewReadHonoursEpochs) {
  PartitionStore s;
  commit(s, 1, 1, 10, "e1", 1);
  commit(s, 1, 2, 20, "e3", 3);
  auto r = s.view_read(1, T(30), 2, nullptr);
  ASSERT_TRUE(r.ready);
  EXPECT_EQ(r.result.value, "e1");
  r = s.view_read(1, T(30), 3, nullptr);
  EXPECT_EQ(r.result.value, "e3");
}

TEST(PartitionStore, ViewReadIntentRules) {
  PartitionStore s;
  commit(s, 1, 1, 10, "base", 1);
  s.apply_intent(1, WriteIntent{X(2), T(20), "slow", 4, 2});
  // Logged after the view: invisible without asking anyone.
  EXPECT_TRUE(s.view_read(1, T(90), 1, nullptr).ready);
  // Logged inside the view and undetermined: blocks.
  auto r = s.view_read(1, T(90), 2, nullptr);
  ASSERT_FALSE(r.ready);
  EXPECT_EQ(r.blockers[0].recorder, 4u);
  // A known fate resolves it: visible iff committed with epoch <= view.
  auto late = [](const TxnId&) { return std::optional<TxnFate>(TxnFate{Decision::Commit, 5}); };
  EXPECT_EQ(s.view_read(1, T(90), 4, late).result.value, "base");
  EXPECT_EQ(s.view_read(1, T(90), 5, late).result.value, "slow");
  auto aborted = [](const TxnId&) { return std::optional<TxnFate>(TxnFate{Decision::Abort, 0}); };
  EXPECT_EQ(s.view_read(1, T(90), 9, aborted).result.value, "base");
}

TEST(PartitionStore, ReadFloorAfterRecovery) {
  PartitionStore s;
  s.set_read_floor(T(500));
  EXPECT_TRUE(std::holds_alternative<AbortRequired>(s.write(1, X(1), T(400), "x", 0, 1)));
  EXPECT_TRUE(std::holds_alternative<WriteAck>(s.write(1, X(2), T(600), "y", 0, 1)));
}
