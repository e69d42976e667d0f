#include <gtest/gtest.h>

#include <vector>

#include "ttkv/epoch/cutter.hpp"
#include "ttkv/epoch/epoch.hpp"

using namespace ttkv;
using namespace ttkv::epoch;

TEST(Epoch, CeilingView) {
  EpochSchedule s{100};
  EXPECT_EQ(read_view(s, {150, 0}).epoch, 2u);
  EXPECT_EQ(read_view(s, {150, 0}).boundary, 200u);
  EXPECT_EQ(read_view(s, {200, 0}).epoch, 2u);
  EXPECT_EQ(read_view(s, {201, 0}).epoch, 3u);
}

TEST(Epoch, CeilingMatchesDefinition) {
  EpochSchedule s{100_ms};
  for (Nanos ts : {Nanos{1}, Nanos{99'999'999}, Nanos{100'000'000}, Nanos{100'000'001}, Nanos{7'345'000'123}}) {
    Epoch k = s.ceiling_epoch(ts);
    EXPECT_LT(s.promised_end(k - 1), ts);
    EXPECT_LE(ts, s.promised_end(k));
  }
}

TEST(Epoch, AssignCommitEpoch) {
  std::vector<Epoch> a{3, 5};
  EXPECT_EQ(assign_commit_epoch(a, 4), 5u);
  std::vector<Epoch> b{7};
  EXPECT_EQ(assign_commit_epoch(b, 7), 7u);
  std::vector<Epoch> c{2};
  EXPECT_EQ(assign_commit_epoch(c, 9), 9u);
  EXPECT_EQ(assign_commit_epoch({}, 6), 6u);
}

TEST(Cutter, TimerFormulas) {
  EXPECT_EQ(first_cut_timer(100_ms, 200e-6), 100'020'000u);
  EXPECT_EQ(next_cut_timer(100_ms, 500_ms, 502_ms, 200e-6), 98'019'600u);
  // Overshoot by more than an interval clamps to an immediate fire.
  EXPECT_EQ(next_cut_timer(100_ms, 500_ms, 750_ms, 200e-6), 0u);
}
