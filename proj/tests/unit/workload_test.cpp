#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ttkv/harness/workload.hpp"

using namespace ttkv;
using namespace ttkv::harness;

namespace {

// Upper 0.1% point of chi-square with `df` degrees of freedom
// (Wilson-Hilferty approximation).
double chi2_critical(double df) {
  const double z = 3.0902;
  double a = 2.0 / (9.0 * df);
  return df * std::pow(1 - a + z * std::sqrt(a), 3);
}

}  // namespace

TEST(Workload, WriteRatioOneHasNoReads) {
  WorkloadConfig cfg;
  cfg.write_ratio = 1.0;
  cfg.txn_count = 500;
  WorkloadGenerator g(cfg, 1, 100_ms);
  while (auto p = g.next())
    for (const Op& op : p->ops) ASSERT_EQ(op.kind, OpKind::Write);
}

TEST(Workload, BlindPresetIgnoresRatio) {
  WorkloadConfig cfg;
  cfg.preset = Preset::BlindWrite;
  cfg.write_ratio = 0.0;
  cfg.txn_count = 200;
  WorkloadGenerator g(cfg, 1, 100_ms);
  while (auto p = g.next())
    for (const Op& op : p->ops) ASSERT_EQ(op.kind, OpKind::Write);
}

TEST(Workload, UniformWhenThetaZero) {
  const std::uint64_t n = 100, draws = 200'000;
  KeySampler ks(n, 0.0);
  std::mt19937_64 rng(17);
  std::vector<double> count(n, 0);
  for (std::uint64_t i = 0; i < draws; ++i) count[ks.sample(rng)] += 1;
  double expected = static_cast<double>(draws) / n;
  double chi2 = 0;
  for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, chi2_critical(n - 1));
}

TEST(Workload, ZipfMatchesReferenceMass) {
  const std::uint64_t n = 50, draws = 300'000;
  const double theta = 0.8;
  std::vector<double> p(n);
  double z = 0;
  for (std::uint64_t r = 0; r < n; ++r) z += p[r] = std::pow(1.0 / (r + 1), theta);
  for (double& v : p) v /= z;

  ZipfTable t(n, theta);
  for (std::uint64_t r = 0; r < n; ++r) EXPECT_NEAR(t.probability(r), p[r], 1e-12);

  std::mt19937_64 rng(23);
  std::vector<double> count(n, 0);
  for (std::uint64_t i = 0; i < draws; ++i) count[t.sample(rng)] += 1;
  double chi2 = 0;
  for (std::uint64_t r = 0; r < n; ++r) {
    double e = p[r] * draws;
    chi2 += (count[r] - e) * (count[r] - e) / e;
  }
  EXPECT_LT(chi2, chi2_critical(n - 1));
}

TEST(Workload, KeyMappingIsBijective) {
  for (std::uint64_t n : {1ull, 2ull, 97ull, 100ull, 10000ull}) {
    KeySampler ks(n, 0.8);
    std::set<Key> keys;
    for (std::uint64_t r = 0; r < n; ++r) keys.insert(ks.key_of_rank(r));
    EXPECT_EQ(keys.size(), n);
    EXPECT_LT(*keys.rbegin(), n);
  }
}

TEST(Workload, Deterministic) {
  WorkloadConfig cfg;
  cfg.txn_count = 300;
  WorkloadGenerator a(cfg, 42, 100_ms), b(cfg, 42, 100_ms), c(cfg, 43, 100_ms);
  bool differs = false;
  while (auto p = a.next()) {
    auto q = b.next();
    auto r = c.next();
    ASSERT_TRUE(q);
    ASSERT_EQ(*p, *q);
    differs |= !(*p == *r);
  }
  EXPECT_FALSE(b.next());
  EXPECT_TRUE(differs);
}

TEST(Workload, SlowCommitPreset) {
  WorkloadConfig cfg;
  cfg.preset = Preset::SlowCommit;
  cfg.txn_count = 20;
  cfg.slow_index = 5;
  cfg.slow_epochs = 3;
  cfg.key_count = 100;
  WorkloadGenerator g(cfg, 1, 100_ms);
  auto slow = g.slow_keys();
  ASSERT_EQ(slow.size(), 2u);
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto p = g.next();
    ASSERT_TRUE(p);
    if (i == 5) {
      EXPECT_EQ(p->tag, "slow");
      ASSERT_EQ(p->ops.back().kind, OpKind::Think);
      EXPECT_EQ(p->ops.back().think, 350_ms);
    } else {
      for (const Op& op : p->ops) EXPECT_LT(op.key, 100u);
    }
  }
}

TEST(Workload, InvalidConfig) {
  WorkloadConfig cfg;
  cfg.write_ratio = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.write_ratio = 0.5;
  cfg.zipf_theta = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
