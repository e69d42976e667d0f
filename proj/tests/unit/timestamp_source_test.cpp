#include <gtest/gtest.h>

#include "ttkv/harness/bench.hpp"
#include "ttkv/truetime/oracle_node.hpp"
#include "ttkv/tsbatch/timestamp_source.hpp"

using namespace ttkv;
using namespace ttkv::tsbatch;

namespace {

class Holder : public simnet::Node {
 public:
  Holder(std::string name, BatchConfig cfg, NodeId oracle) : Node(std::move(name)), cfg_(cfg), oracle_(oracle) {}
  void on_start() override { src = std::make_unique<TimestampSource>(env(), cfg_, oracle_); }
  void on_message(NodeId, const simnet::Message& m) override { src->handle(m); }
  void get() {
    Nanos asked = env().local_now();
    src->acquire([this, asked](std::optional<TsGrant> g) {
      grants.push_back(g);
      waited.push_back(env().local_now() - asked);
    });
  }
  std::unique_ptr<TimestampSource> src;
  std::vector<std::optional<TsGrant>> grants;
  std::vector<Nanos> waited;

 private:
  BatchConfig cfg_;
  NodeId oracle_;
};

struct Rig {
  explicit Rig(Mode mode) : rt(1, net(), 500_us) {
    oracle = rt.add(std::make_unique<truetime::OracleNode>("oracle.SH", 0, 100_us, [this] { return rt.true_now(); }),
                    0, {}, true);
    BatchConfig cfg;
    cfg.mode = mode;
    holder = rt.add(std::make_unique<Holder>("h", cfg, oracle), 0, {});
    rt.start_all();
    rt.run_until(1_ms);
  }
  static simnet::NetworkConfig net() {
    simnet::NetworkConfig n;
    n.jitter = 0;
    return n;
  }
  Holder& h() { return rt.get<Holder>(holder); }
  truetime::OracleNode& o() { return rt.get<truetime::OracleNode>(oracle); }

  simnet::Runtime rt;
  NodeId oracle, holder;
};

}  // namespace

TEST(TimestampSource, BurstIsServedFromOneBatch) {
  Rig r(Mode::Batched);
  for (int i = 0; i < 100; ++i) r.h().get();
  r.rt.run_until(2_ms);
  ASSERT_EQ(r.h().grants.size(), 100u);
  for (std::size_t i = 1; i < 100; ++i) EXPECT_LT(r.h().grants[i - 1]->ts, r.h().grants[i]->ts);
  EXPECT_EQ(r.h().src->stats().oracle_calls, 1u);
  EXPECT_EQ(r.h().grants[0]->cwt.duration, 400'080u);
}

TEST(TimestampSource, ExpiredBatchIsRefetched) {
  Rig r(Mode::Batched);
  r.h().get();
  r.rt.run_until(2_ms);
  r.h().get();
  r.rt.run_until(3_ms);
  ASSERT_EQ(r.h().grants.size(), 2u);
  EXPECT_EQ(r.h().src->stats().oracle_calls, 2u);
  EXPECT_LT(r.h().grants[0]->ts, r.h().grants[1]->ts);
}

TEST(TimestampSource, StrawmanAsksEveryTime) {
  Rig r(Mode::Strawman);
  for (int i = 0; i < 5; ++i) r.h().get();
  r.rt.run_until(2_ms);
  ASSERT_EQ(r.h().grants.size(), 5u);
  EXPECT_EQ(r.h().src->stats().oracle_calls, 5u);
  EXPECT_EQ(r.h().src->stats().local, 0u);
  EXPECT_EQ(r.h().grants[0]->cwt.duration, 200'040u);
}

TEST(TimestampSource, OutageSurfacesAfterRetries) {
  Rig r(Mode::Batched);
  r.o().server().set_available(false);
  r.h().get();
  r.rt.run_until(2'000_ms);
  ASSERT_EQ(r.h().grants.size(), 1u);
  EXPECT_FALSE(r.h().grants[0]);
  EXPECT_EQ(r.h().src->stats().oracle_calls, static_cast<std::uint64_t>(TimestampSource::kMaxAttempts));
  r.o().server().set_available(true);
  r.h().get();
  r.rt.run_until(2'010_ms);
  ASSERT_EQ(r.h().grants.size(), 2u);
  EXPECT_TRUE(r.h().grants[1]);
}

TEST(TsBench, BatchedVersusStrawman) {
  harness::TsBenchConfig cfg;
  cfg.duration = 20_ms;
  auto b = harness::bench_timestamps(cfg);
  EXPECT_EQ(b.stats.max_capacity, 10'000u);
  EXPECT_GE(b.local_ratio, 0.999);
  EXPECT_EQ(b.failed, 0u);
  cfg.ts.mode = Mode::Strawman;
  auto s = harness::bench_timestamps(cfg);
  EXPECT_EQ(s.stats.oracle_calls, s.stats.requests);
  EXPECT_EQ(s.local_ratio, 0.0);
  EXPECT_GT(s.mean_latency_ns, b.mean_latency_ns);
}
