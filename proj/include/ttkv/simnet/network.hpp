#pragma once

#include <random>
#include <string>
#include <vector>

#include "ttkv/core.hpp"

namespace ttkv::simnet {

/// Symmetric region x region round-trip latencies.
class LatencyMatrix {
 public:
  LatencyMatrix() = default;
  LatencyMatrix(std::vector<std::string> regions, std::vector<std::vector<double>> rtt_ms);

  /// SH, BJ, GZ, GY, SG with the measured inter-region round trips.
  static LatencyMatrix default_five_regions();

  std::size_t size() const { return regions_.size(); }
  const std::vector<std::string>& regions() const { return regions_; }
  RegionId region_index(const std::string& name) const;

  double rtt_ms(RegionId a, RegionId b) const { return rtt_ms_[a][b]; }
  /// rtt / 2 in nanoseconds, before jitter.
  Nanos one_way(RegionId a, RegionId b) const;
  Nanos max_one_way() const;

 private:
  std::vector<std::string> regions_;
  std::vector<std::vector<double>> rtt_ms_;
};

struct PartitionWindow {
  std::vector<RegionId> side;
  Nanos from = 0;
  Nanos to = 0;
};

struct NetworkConfig {
  LatencyMatrix matrix = LatencyMatrix::default_five_regions();
  double jitter = 0.10;
  double drop_prob = 0.0;
  double reorder_prob = 0.0;
  double duplicate_prob = 0.0;
  /// Round trip between a node and an oracle server in its own region.
  Nanos oracle_rtt = 18_us;
  std::vector<PartitionWindow> partitions;

  void validate() const;
};

/// Samples one-way delays and loss decisions. Owns no state besides config.
class NetworkModel {
 public:
  explicit NetworkModel(NetworkConfig cfg) : cfg_(std::move(cfg)) {}

  const NetworkConfig& config() const { return cfg_; }

  Nanos sample_delay(RegionId a, RegionId b, bool oracle_link, std::mt19937_64& rng) const;
  bool partitioned(RegionId a, RegionId b, Nanos at) const;

 private:
  NetworkConfig cfg_;
};

}  // namespace ttkv::simnet
