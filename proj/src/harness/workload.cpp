#include "ttkv/harness/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ttkv::harness {

const char* to_string(Preset p) {
  switch (p) {
    case Preset::Ycsb:
      return "ycsb";
    case Preset::BlindWrite:
      return "blind_write";
    case Preset::SlowCommit:
      return "slow_commit";
  }
  return "?";
}

Preset parse_preset(const std::string& text) {
  if (text == "ycsb") return Preset::Ycsb;
  if (text == "blind_write") return Preset::BlindWrite;
  if (text == "slow_commit") return Preset::SlowCommit;
  throw ConfigError("unknown workload preset: " + text);
}

void WorkloadConfig::validate() const {
  if (write_ratio < 0 || write_ratio > 1) throw ConfigError("write_ratio must be in [0, 1]");
  if (zipf_theta < 0) throw ConfigError("zipf_theta must be non-negative");
  if (ops_per_txn == 0) throw ConfigError("ops_per_txn must be positive");
  if (key_count == 0) throw ConfigError("key_count must be positive");
  if (preset == Preset::SlowCommit && slow_epochs == 0) throw ConfigError("slow_epochs must be positive");
}

ZipfTable::ZipfTable(std::uint64_t n, double theta) {
  if (n == 0) throw ConfigError("zipf table needs at least one rank");
  cdf_.resize(n);
  double sum = 0;
  for (std::uint64_t r = 0; r < n; ++r) {
    sum += 1.0 / std::pow(static_cast<double>(r + 1), theta);
    cdf_[r] = sum;
  }
  for (double& c : cdf_) c /= sum;
  cdf_.back() = 1.0;
}

std::uint64_t ZipfTable::sample(std::mt19937_64& rng) const {
  double u = std::uniform_real_distribution<double>(0, 1)(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::uint64_t>(it - cdf_.begin());
}

double ZipfTable::probability(std::uint64_t rank) const {
  return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
}

KeySampler::KeySampler(std::uint64_t key_count, double theta) : n_(key_count), mul_(1), zipf_(key_count, theta) {
  if (n_ > 1) {
    mul_ = 2654435761ull % n_;
    while (mul_ == 0 || std::gcd(mul_, n_) != 1) mul_ = (mul_ + 1) % n_;
  }
}

Key KeySampler::key_of_rank(std::uint64_t rank) const {
  return static_cast<Key>((static_cast<unsigned __int128>(rank) * mul_ + 7) % n_);
}

WorkloadGenerator::WorkloadGenerator(WorkloadConfig cfg, std::uint64_t seed, Nanos epoch_interval)
    : cfg_(cfg), epoch_interval_(epoch_interval), rng_(seed), keys_(cfg.key_count, cfg.zipf_theta) {
  cfg_.validate();
}

std::vector<Key> WorkloadGenerator::slow_keys() const {
  if (cfg_.preset != Preset::SlowCommit) return {};
  return {cfg_.key_count, cfg_.key_count + 1};
}

std::optional<TxnProgram> WorkloadGenerator::next() {
  if (exhausted()) return std::nullopt;
  const std::uint64_t index = generated_++;
  if (cfg_.preset == Preset::SlowCommit && index == cfg_.slow_index) {
    TxnProgram slow;
    slow.tag = "slow";
    for (Key k : slow_keys()) slow.ops.push_back(Op{OpKind::Write, k, 0});
    slow.ops.push_back(Op{OpKind::Think, 0, cfg_.slow_epochs * epoch_interval_ + epoch_interval_ / 2});
    return slow;
  }
  return make_regular();
}

TxnProgram WorkloadGenerator::make_regular() {
  TxnProgram p;
  const bool blind = cfg_.preset == Preset::BlindWrite;
  std::uniform_real_distribution<double> u(0, 1);
  for (std::uint32_t i = 0; i < cfg_.ops_per_txn; ++i) {
    Key k = keys_.sample(rng_);
    bool write = blind || u(rng_) < cfg_.write_ratio;
    p.ops.push_back(Op{write ? OpKind::Write : OpKind::Read, k, 0});
  }
  return p;
}

}  // namespace ttkv::harness
