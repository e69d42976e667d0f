#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ttkv/core.hpp"

namespace ttkv::harness {

enum class OpKind { Read, Write, Think };

struct Op {
  OpKind kind = OpKind::Read;
  Key key = 0;
  Nanos think = 0;

  bool operator==(const Op&) const = default;
};

struct TxnProgram {
  std::vector<Op> ops;
  std::string tag;

  bool operator==(const TxnProgram&) const = default;
};

enum class Preset { Ycsb, BlindWrite, SlowCommit };

const char* to_string(Preset p);
Preset parse_preset(const std::string& text);

struct WorkloadConfig {
  Preset preset = Preset::Ycsb;
  std::uint32_t ops_per_txn = 3;
  double write_ratio = 0.5;
  std::uint64_t key_count = 10000;
  double zipf_theta = 0.8;
  std::uint64_t txn_count = 10000;
  /// SlowCommit: the slow transaction thinks for slow_epochs intervals plus half.
  std::uint32_t slow_epochs = 3;
  /// SlowCommit: index of the slow program in the stream.
  std::uint64_t slow_index = 2000;

  void validate() const;
};

/// Exact inverse-CDF sampler over ranks [0, n) with P(r) proportional to
/// 1 / (r + 1)^theta.
class ZipfTable {
 public:
  ZipfTable(std::uint64_t n, double theta);

  std::uint64_t sample(std::mt19937_64& rng) const;
  double probability(std::uint64_t rank) const;
  std::uint64_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

/// Zipfian keys with popularity ranks scattered over the key space by a
/// multiplicative bijection, so hot keys land on different partitions.
class KeySampler {
 public:
  KeySampler(std::uint64_t key_count, double theta);

  Key sample(std::mt19937_64& rng) const { return key_of_rank(zipf_.sample(rng)); }
  Key key_of_rank(std::uint64_t rank) const;
  std::uint64_t key_count() const { return n_; }

 private:
  std::uint64_t n_;
  std::uint64_t mul_;
  ZipfTable zipf_;
};

/// Deterministic stream of transaction programs.
class WorkloadGenerator {
 public:
  WorkloadGenerator(WorkloadConfig cfg, std::uint64_t seed, Nanos epoch_interval);

  /// nullopt once txn_count programs have been produced.
  std::optional<TxnProgram> next();

  std::uint64_t generated() const { return generated_; }
  bool exhausted() const { return generated_ >= cfg_.txn_count; }
  const WorkloadConfig& config() const { return cfg_; }
  const KeySampler& keys() const { return keys_; }

  /// Keys reserved for the slow transaction; never touched by other programs.
  std::vector<Key> slow_keys() const;

 private:
  TxnProgram make_regular();

  WorkloadConfig cfg_;
  Nanos epoch_interval_;
  std::mt19937_64 rng_;
  KeySampler keys_;
  std::uint64_t generated_ = 0;
};

}  // namespace ttkv::harness
