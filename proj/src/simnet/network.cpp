#include "ttkv/simnet/network.hpp"

#include <algorithm>
#include <cmath>

namespace ttkv::simnet {

LatencyMatrix::LatencyMatrix(std::vector<std::string> regions, std::vector<std::vector<double>> rtt_ms)
    : regions_(std::move(regions)), rtt_ms_(std::move(rtt_ms)) {
  const std::size_t n = regions_.size();
  if (n == 0) throw ConfigError("latency matrix needs at least one region");
  if (rtt_ms_.size() != n) throw ConfigError("latency matrix row count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (rtt_ms_[i].size() != n) throw ConfigError("latency matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (rtt_ms_[i][j] < 0) throw ConfigError("negative latency");
      if (std::abs(rtt_ms_[i][j] - rtt_ms_[j][i]) > 1e-9) throw ConfigError("latency matrix is not symmetric");
    }
  }
}

LatencyMatrix LatencyMatrix::default_five_regions() {
  return LatencyMatrix({"SH", "BJ", "GZ", "GY", "SG"}, {
                                                           {0.2, 27.3, 31.3, 29.2, 69.3},
                                                           {27.3, 0.2, 42.6, 38.5, 77.6},
                                                           {31.3, 42.6, 0.2, 28.0, 46.8},
                                                           {29.2, 38.5, 28.0, 0.2, 60.0},
                                                           {69.3, 77.6, 46.8, 60.0, 0.2},
                                                       });
}

RegionId LatencyMatrix::region_index(const std::string& name) const {
  auto it = std::find(regions_.begin(), regions_.end(), name);
  if (it == regions_.end()) throw ConfigError("unknown region: " + name);
  return static_cast<RegionId>(it - regions_.begin());
}

Nanos LatencyMatrix::one_way(RegionId a, RegionId b) const {
  return static_cast<Nanos>(std::llround(rtt_ms_[a][b] * 1e6 / 2));
}

Nanos LatencyMatrix::max_one_way() const {
  Nanos m = 0;
  for (RegionId a = 0; a < size(); ++a)
    for (RegionId b = 0; b < size(); ++b) m = std::max(m, one_way(a, b));
  return m;
}

void NetworkConfig::validate() const {
  auto prob = [](double p, const char* what) {
    if (p < 0 || p > 1) throw ConfigError(std::string(what) + " must be in [0, 1]");
  };
  prob(drop_prob, "drop_prob");
  prob(reorder_prob, "reorder_prob");
  prob(duplicate_prob, "duplicate_prob");
  if (jitter < 0 || jitter >= 1) throw ConfigError("jitter must be in [0, 1)");
  for (const auto& p : partitions) {
    if (p.to < p.from) throw ConfigError("partition window ends before it starts");
    for (RegionId r : p.side)
      if (r >= matrix.size()) throw ConfigError("partition names an unknown region");
  }
}

Nanos NetworkModel::sample_delay(RegionId a, RegionId b, bool oracle_link, std::mt19937_64& rng) const {
  double base = oracle_link ? static_cast<double>(cfg_.oracle_rtt) / 2 : static_cast<double>(cfg_.matrix.one_way(a, b));
  double j = std::uniform_real_distribution<double>(-cfg_.jitter, cfg_.jitter)(rng);
  double d = base * (1 + j);
  if (cfg_.reorder_prob > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < cfg_.reorder_prob) {
    d += std::uniform_real_distribution<double>(0, base)(rng);
  }
  return static_cast<Nanos>(std::max(1.0, std::round(d)));
}

bool NetworkModel::partitioned(RegionId a, RegionId b, Nanos at) const {
  for (const auto& p : cfg_.partitions) {
    if (at < p.from || at >= p.to) continue;
    bool in_a = std::find(p.side.begin(), p.side.end(), a) != p.side.end();
    bool in_b = std::find(p.side.begin(), p.side.end(), b) != p.side.end();
    if (in_a != in_b) return true;
  }
  return false;
}

}  // namespace ttkv::simnet
