#include "ttkv/harness/visibility.hpp"

#include <algorithm>
#include <set>

namespace ttkv::harness {

namespace {

Nanos percentile(std::vector<Nanos> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  std::size_t i = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(i, v.size() - 1)];
}

}  // namespace

VisibilityReport measure_visibility(const History& h, const std::string& tag) {
  VisibilityReport out;
  std::map<PartitionId, std::vector<const std::vector<std::pair<Epoch, Nanos>>*>> by_partition;
  for (const auto& [node, p] : h.replica_partition) by_partition[p].push_back(&h.replayed.at(node));

  for (const TxnHistory* t : h.committed()) {
    if (!t->has_writes() || !t->end || !t->reported_commit || !*t->reported_commit) continue;
    if (!tag.empty() && t->tag != tag) continue;
    const Epoch c = *t->commit_epoch;
    std::set<PartitionId> parts;
    for (const auto& w : t->writes) parts.insert(w.partition);
    Nanos visible = 0;
    bool resolved = true;
    for (PartitionId p : parts) {
      auto it = by_partition.find(p);
      if (it == by_partition.end()) continue;
      for (const auto* series : it->second) {
        auto s = std::lower_bound(series->begin(), series->end(), c,
                                  [](const std::pair<Epoch, Nanos>& e, Epoch v) { return e.first < v; });
        if (s == series->end()) {
          resolved = false;
          break;
        }
        visible = std::max(visible, s->second);
      }
    }
    if (!resolved) {
      ++out.unresolved;
      continue;
    }
    out.samples.push_back(VisibilitySample{t->id, *t->end, c, visible > *t->end ? visible - *t->end : 0});
  }
  std::sort(out.samples.begin(), out.samples.end(),
            [](const auto& a, const auto& b) { return a.committed_at < b.committed_at; });
  std::vector<Nanos> d;
  for (const auto& s : out.samples) d.push_back(s.delay);
  if (!d.empty()) out.max = *std::max_element(d.begin(), d.end());
  out.p50 = percentile(d, 0.5);
  out.p90 = percentile(d, 0.9);
  out.p99 = percentile(d, 0.99);
  return out;
}

PeriodEstimate dominant_period(const std::vector<VisibilitySample>& samples, Nanos lo, Nanos hi, Nanos bin) {
  PeriodEstimate out;
  if (samples.size() < 2 || bin == 0) return out;
  const Nanos t0 = samples.front().committed_at;
  const std::size_t n = (samples.back().committed_at - t0) / bin + 1;
  std::vector<double> sum(n, 0), series(n, 0);
  std::vector<std::size_t> count(n, 0);
  for (const auto& s : samples) {
    std::size_t i = (s.committed_at - t0) / bin;
    sum[i] += static_cast<double>(s.delay);
    ++count[i];
  }
  double last = sum[0] / static_cast<double>(count[0]);
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i]) last = sum[i] / static_cast<double>(count[i]);
    series[i] = last;
  }
  double mean = 0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  double energy = 0;
  for (double& x : series) {
    x -= mean;
    energy += x * x;
  }
  if (energy == 0) return out;
  for (std::size_t lag = std::max<Nanos>(1, lo / bin); lag <= hi / bin && lag < n; ++lag) {
    double acc = 0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += series[i] * series[i + lag];
    double r = acc / energy;
    if (!out.found || r > out.peak) {
      out.found = true;
      out.peak = r;
      out.period = lag * bin;
    }
  }
  return out;
}

}  // namespace ttkv::harness
