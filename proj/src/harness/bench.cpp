#include "ttkv/harness/bench.hpp"

#include <algorithm>

#include "ttkv/truetime/oracle_node.hpp"

namespace ttkv::harness {

namespace {

class BenchNode : public simnet::Node {
 public:
  BenchNode(const TsBenchConfig& cfg, NodeId oracle) : Node("bench"), cfg_(cfg), oracle_(oracle) {}

  void on_start() override {
    source_ = std::make_unique<tsbatch::TimestampSource>(env(), cfg_.ts, oracle_);
    gap_ = std::max<Nanos>(1, static_cast<Nanos>(1e9 / cfg_.rate));
    total_ = cfg_.duration / gap_;
    tick();
  }

  void on_message(NodeId, const simnet::Message& m) override { source_->handle(m); }

  void tick() {
    if (issued_ >= total_) return;
    ++issued_;
    Nanos start = env().local_now();
    source_->acquire([this, start](std::optional<tsbatch::TsGrant> g) {
      if (!g) {
        ++failed_;
        return;
      }
      latencies_.push_back(env().local_now() - start);
    });
    env().after(gap_, [this] { tick(); });
  }

  TsBenchConfig cfg_;
  NodeId oracle_;
  std::unique_ptr<tsbatch::TimestampSource> source_;
  Nanos gap_ = 1;
  std::uint64_t total_ = 0;
  std::uint64_t issued_ = 0;
  std::uint64_t failed_ = 0;
  std::vector<Nanos> latencies_;
};

}  // namespace

TsBenchResult bench_timestamps(const TsBenchConfig& cfg) {
  simnet::NetworkConfig net;
  net.matrix = simnet::LatencyMatrix({"local"}, {{0.2}});
  net.oracle_rtt = cfg.oracle_rtt;
  simnet::Runtime rt(cfg.seed, net, 500_us);
  NodeId oracle = rt.add(std::make_unique<truetime::OracleNode>("oracle", 0, cfg.ts.epsilon, [&rt] { return rt.true_now(); }),
                         0, truetime::DriftClock(), true);
  NodeId bench = rt.add(std::make_unique<BenchNode>(cfg, oracle), 0, truetime::DriftClock(cfg.drift, 0));
  rt.start_all();
  rt.run_until(cfg.duration + 100_ms);

  auto& node = rt.get<BenchNode>(bench);
  TsBenchResult out;
  out.stats = node.source_->stats();
  out.granted = node.latencies_.size();
  out.failed = node.failed_;
  if (out.stats.requests) out.local_ratio = static_cast<double>(out.stats.local) / static_cast<double>(out.stats.requests);
  if (!node.latencies_.empty()) {
    double sum = 0;
    for (Nanos l : node.latencies_) sum += static_cast<double>(l);
    out.mean_latency_ns = sum / static_cast<double>(node.latencies_.size());
    std::vector<Nanos> sorted = node.latencies_;
    std::sort(sorted.begin(), sorted.end());
    out.p99_latency = sorted[static_cast<std::size_t>(0.99 * static_cast<double>(sorted.size() - 1))];
  }
  out.throughput = static_cast<double>(out.granted) / (static_cast<double>(cfg.duration) / 1e9);
  return out;
}

}  // namespace ttkv::harness
