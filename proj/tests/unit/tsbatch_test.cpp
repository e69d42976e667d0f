#include <gtest/gtest.h>

#include <cmath>

#include "ttkv/tsbatch/batch.hpp"

using namespace ttkv;
using namespace ttkv::tsbatch;

namespace {

truetime::UncertainTime reading(Nanos latest, ServerId sid = 0) { return {latest - 200_us, latest, sid}; }

Timestamp issue(TimestampBatch& b, Nanos local = 0) {
  auto r = b.next(local, 0);
  EXPECT_TRUE(std::holds_alternative<Timestamp>(r));
  return std::get<Timestamp>(r);
}

}  // namespace

TEST(Batch, BoundsAndCapacity) {
  auto b = build_batch(reading(1'000'000'000), 100'000, 10);
  EXPECT_EQ(b.low(), 1'000'100'000u);
  EXPECT_EQ(b.up(), 1'000'200'000u);
  EXPECT_EQ(b.capacity(), 10'000u);
  EXPECT_EQ(b.issued(), 0u);

  EXPECT_EQ(build_batch(reading(500'000), 100'000, 100'000).capacity(), 1u);

  auto z = build_batch({0, 0, 0}, 1000, 10);
  EXPECT_EQ(z.low(), 1000u);
  EXPECT_EQ(z.up(), 2000u);
  EXPECT_EQ(z.capacity(), 100u);
}

TEST(Batch, InvalidConfig) {
  EXPECT_THROW(build_batch(reading(1_ms), 0, 10), ConfigError);
  EXPECT_THROW(build_batch(reading(1_ms), 100, 0), ConfigError);
  BatchConfig cfg;
  cfg.step = 30;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.step = 10;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Batch, ArithmeticProgression) {
  auto b = build_batch(reading(1'000'000'000, 4), 100'000, 10);
  Timestamp a = issue(b);
  Timestamp c = issue(b);
  EXPECT_EQ(a.nanos, 1'000'100'000u);
  EXPECT_EQ(c.nanos, 1'000'100'010u);
  EXPECT_EQ(a.server_id, 4u);
}

TEST(Batch, ExhaustedAfterCapacity) {
  auto b = build_batch(reading(1_ms), 100'000, 100'000);
  issue(b);
  EXPECT_TRUE(std::holds_alternative<Exhausted>(b.next(0, 0)));
}

TEST(Batch, EveryIssueInsideWindow) {
  auto b = TimestampBatch::build(reading(7_ms), 100_us, 10, 0, 9);
  std::uint64_t n = 0;
  while (true) {
    auto r = b.next(0, 0);
    if (!std::holds_alternative<Timestamp>(r)) {
      EXPECT_TRUE(std::holds_alternative<Exhausted>(r));
      break;
    }
    Timestamp t = std::get<Timestamp>(r);
    ASSERT_GE(t.nanos, b.low());
    ASSERT_LT(t.nanos, b.up());
    ASSERT_EQ(t.issuer, 9u);
    ++n;
  }
  EXPECT_EQ(n, 10'000u);
}

TEST(Batch, ExpiryIsDriftCompensated) {
  const double D = 200e-6;
  auto b = TimestampBatch::build(reading(1_ms), 100_us, 10, 5_ms);
  // Largest elapsed e with ceil(e * (1 + D)) < ttl.
  Nanos e = 0;
  while (static_cast<Nanos>(std::ceil((e + 1) * (1 + D))) < 100_us) ++e;
  EXPECT_TRUE(std::holds_alternative<Timestamp>(b.next(5_ms + e, D)));
  EXPECT_TRUE(std::holds_alternative<Expired>(b.next(5_ms + e + 1, D)));
  EXPECT_TRUE(std::holds_alternative<Expired>(b.next(5_ms + 100_us, 0)));
}

TEST(Batch, RefetchAfterExpiryIsAboveOldIssues) {
  // The holder fetches at true 1 ms, uses the batch and fetches again after
  // the TTL has passed. The new reading's latest bound is at least the true
  // fetch instant, the old batch's values stay below old latest + 2 ttl.
  const Nanos eps = 100_us, ttl = 100_us;
  truetime::OracleServer s(0, eps);
  auto first = s.now(1_ms, 1.0);
  auto b1 = build_batch(first.time, ttl, 10);
  Nanos old_max = 0;
  for (int i = 0; i < 50; ++i) old_max = issue(b1).nanos;
  Nanos refetch = first.time.latest + 2 * ttl;
  auto second = s.now(refetch, 0.0);
  auto b2 = build_batch(second.time, ttl, 10);
  EXPECT_GT(issue(b2).nanos, old_max);
}

TEST(Batch, SkipThrough) {
  auto b = build_batch({0, 0, 0}, 1000, 10);
  b.skip_through(1055);
  EXPECT_EQ(issue(b).nanos, 1060u);
  b.skip_through(500);
  EXPECT_EQ(issue(b).nanos, 1070u);
}

TEST(CommitWait, Durations) {
  BatchConfig cfg;
  cfg.ttl = 100_us;
  cfg.epsilon = 100_us;
  cfg.max_drift = 200e-6;
  EXPECT_EQ(commit_wait_duration(cfg), 400'080u);
  cfg.mode = Mode::Strawman;
  EXPECT_EQ(commit_wait_duration(cfg), 200'040u);
}

TEST(CommitWait, Boundary) {
  CommitWaitDeadline d{400'080, 0};
  EXPECT_FALSE(commit_wait_elapsed(d, 400'079));
  EXPECT_TRUE(commit_wait_elapsed(d, 400'080));
  CommitWaitDeadline s{1000, 500};
  EXPECT_EQ(s.remaining(700), 800u);
  EXPECT_EQ(s.remaining(1500), 0u);
}

TEST(Timestamp, Compare) {
  EXPECT_EQ(compare({100, 1}, {200, 0}), Ordering::Less);
  EXPECT_EQ(compare({100, 1}, {100, 2}), Ordering::Less);
  EXPECT_EQ(compare({100, 1}, {100, 1}), Ordering::Equal);
  EXPECT_EQ(compare({300, 0}, {100, 9}), Ordering::Greater);
}

TEST(Mode, Parse) {
  EXPECT_EQ(parse_mode("batched"), Mode::Batched);
  EXPECT_EQ(parse_mode("strawman"), Mode::Strawman);
  EXPECT_THROW(parse_mode("other"), ConfigError);
}
