// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "../support/random_histories.hpp"
#include "ttkv/harness/bench.hpp"
#include "ttkv/harness/checkers.hpp"
#include "ttkv/harness/cluster.hpp"
#include "ttkv/harness/visibility.hpp"

#ifndef TTKV_SCENARIO_DIR
#define TTKV_SCENARIO_DIR "scenarios"
#endif

using namespace ttkv;
using namespace ttkv::harness;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

struct Run {
  Scenario scenario;
  RunSummary summary;
  History history;
  std::vector<Key> slow_keys;
  std::set<std::string> took_over;
  std::set<std::string> restarted;
};

// Totals carried across every cluster run of the suite.
struct Totals {
  std::uint64_t runs = 0;
  std::uint64_t wait_edges = 0;
  std::uint64_t deadlock_violations = 0;
  std::string deadlock_detail;
  std::uint64_t fault_runs = 0;
  std::uint64_t durability_checked = 0;
  std::uint64_t durability_violations = 0;
  std::string durability_detail;
} totals;

Scenario load(const std::string& name, std::uint64_t seed) {
  Scenario s = Scenario::load(std::string(TTKV_SCENARIO_DIR) + "/" + name + ".yaml");
  s.seed = seed;
  return s;
}

Run run(const std::string& name, std::uint64_t seed) {
  Scenario s = load(name, seed);
  Cluster c(s);
  Run r{s, c.run(), History::from_trace(c.trace()), c.generator().slow_keys(), {}, {}};
  for (const auto& e : c.trace().events) {
    if (const auto* t = std::get_if<trace::Takeover>(&e.body)) r.took_over.insert(t->node);
    if (const auto* u = std::get_if<trace::NodeUp>(&e.body)) r.restarted.insert(u->node);
  }
  ++totals.runs;
  Verdict d = check_deadlock_freedom(r.history);
  totals.wait_edges += d.checked;
  totals.deadlock_violations += d.violations;
  if (!d.pass && totals.deadlock_detail.empty()) totals.deadlock_detail = name + ": " + d.detail;
  bool faulty = !s.faults.empty() || s.network.drop_prob > 0 || !s.network.partitions.empty();
  if (faulty) {
    ++totals.fault_runs;
    Verdict v = check_durability(r.history);
    totals.durability_checked += v.checked;
    totals.durability_violations += v.violations;
    if (!v.pass && totals.durability_detail.empty())
      totals.durability_detail = name + " seed " + std::to_string(seed) + ": " + v.detail;
  }
  return r;
}

double ms(Nanos n) { return static_cast<double>(n) / 1e6; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Time by which a cut of epoch n can trail T_n: the cutter's timestamp can
// lead true time by the commit wait, plus one oracle round trip and the
// drift of one interval.
Nanos cut_slack(const Scenario& s) {
  const double D = s.clocks.max_drift;
  double cw = 2.0 * static_cast<double>(s.ttl + s.clocks.epsilon) * (1 + D);
  return static_cast<Nanos>(cw + static_cast<double>(s.network.oracle_rtt) + static_cast<double>(s.epoch_interval) * D);
}

Result property1_sweep() {
  Result r;
  std::uint64_t checked = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Run x = run("property1", seed);
    Verdict v = check_property1(x.history);
    checked += v.checked;
    bad += v.violations;
    if (!v.pass && r.pass) r.detail = "seed " + std::to_string(seed) + ": " + v.detail + "; ";
    r.pass &= v.pass && x.summary.completed && x.summary.committed + x.summary.aborted == 10000;
  }
  r.detail += std::to_string(checked) + " committed txns over 10 seeds, " + std::to_string(bad) + " violations";
  return r;
}

Result strict_serializability_sweep() {
  Result r;
  std::uint64_t txns = 0, takeovers = 0, crashes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Run x = run("faults", seed);
    Verdict v = check_strict_serializability(x.history);
    txns += v.checked;
    const bool took = x.took_over.count("rec.1.b") > 0;
    const bool crashed = x.restarted.count("coord.SH.0") > 0;
    takeovers += took;
    crashes += crashed;
    if (!v.pass && r.pass) r.detail = "seed " + std::to_string(seed) + ": " + v.detail + "; ";
    r.pass &= v.pass && x.summary.completed && took && crashed;
  }
  r.detail += std::to_string(txns) + " committed txns over 20 seeds; takeover seen in " + std::to_string(takeovers) +
              ", coordinator restart seen in " + std::to_string(crashes);
  return r;
}

Result checker_self_validation() {
  Result r;
  std::mt19937_64 rng(2024);
  std::uint64_t n = 0, agree = 0, yes = 0, no = 0;
  for (; n < 2000; ++n) {
    History h = ttkv::testing::random_history(rng);
    bool a = check_strict_serializability(h).pass;
    bool b = brute_force_serializable(h);
    agree += a == b;
    (b ? yes : no)++;
  }
  r.pass = agree == n && yes > 0 && no > 0;
  r.detail = std::to_string(agree) + "/" + std::to_string(n) + " histories agree (" + std::to_string(yes) +
             " serializable, " + std::to_string(no) + " not)";
  return r;
}

Result blind_writes() {
  Run x = run("blind_write", 1);
  Result r;
  r.pass = x.summary.completed && x.summary.aborted == 0 && x.summary.committed == 10000;
  r.detail = std::to_string(x.summary.committed) + " committed, " + std::to_string(x.summary.aborted) + " aborted";
  return r;
}

Result epoch_cuts() {
  Run x = run("epochs", 1);
  Result r;
  Verdict v = check_property2(x.history);
  std::uint64_t data_cuts = 0;
  Nanos min_margin = ~Nanos{0};
  for (const auto& [node, e, at] : x.history.cuts) {
    if (node.rfind("data.", 0) == 0) ++data_cuts;
    Nanos promised = e * x.scenario.epoch_interval;
    if (at > promised) min_margin = std::min(min_margin, at - promised);
  }
  r.pass = v.pass && data_cuts >= 10000;
  r.detail = std::to_string(data_cuts) + " data-node cuts (" + std::to_string(v.checked) + " in total), " +
             std::to_string(v.violations) + " violations, smallest margin " + fmt("%.3f ms", ms(min_margin));
  if (!v.pass) r.detail += "; " + v.detail;
  return r;
}

Result slow_commit() {
  Run x = run("slow_commit", 1);
  const History& h = x.history;
  const Scenario& s = x.scenario;
  Result r;
  std::ostringstream os;

  Verdict rc = check_replica_consistency(h);
  os << rc.checked << " replica reads, consistency " << (rc.pass ? "ok" : "FAILED " + rc.detail);
  r.pass &= rc.pass && rc.checked >= 10000;

  const TxnHistory* slow = nullptr;
  for (const auto& t : h.txns)
    if (t.tag == "slow") slow = &t;
  if (!slow || slow->outcome != TxnOutcome::Committed || !slow->end || slow->writes.empty()) {
    r.pass = false;
    r.detail = os.str() + "; slow transaction did not commit";
    return r;
  }
  Epoch first = slow->writes.front().proposed_epoch;
  for (const auto& w : slow->writes) first = std::min(first, w.proposed_epoch);
  const Epoch span = *slow->commit_epoch - first;
  const Nanos hold = *slow->end - slow->begin;
  os << "; slow txn spans " << span << " epochs, held " << fmt("%.1f ms", ms(hold));
  r.pass &= span >= 3;

  const std::set<Key> slow_keys(x.slow_keys.begin(), x.slow_keys.end());
  std::set<std::uint64_t> touching;
  for (const auto& rr : h.replica_reads)
    for (const auto& k : rr.keys)
      if (slow_keys.count(k.key)) touching.insert(rr.read_id);
  std::set<std::uint64_t> coupled;
  std::uint64_t pushes_to_slow = 0;
  for (const auto& w : h.waits) {
    if (w.waiter.rfind("rread:", 0) != 0 || !(w.holder == slow->id)) continue;
    std::uint64_t id = std::stoull(w.waiter.substr(6));
    ++pushes_to_slow;
    if (!touching.count(id)) coupled.insert(id);
  }

  // Replay catch-up: one interval (on a drifting timer), the cut slack, the
  // longest shipping hop with jitter, one ship period and one flush.
  const Nanos catch_up = static_cast<Nanos>(static_cast<double>(s.epoch_interval) * (1 + s.clocks.max_drift)) +
                         cut_slack(s) +
                         static_cast<Nanos>(static_cast<double>(s.network.matrix.max_one_way()) * 1.2) +
                         s.ship_interval + s.flush_latency;
  Nanos max_wait = 0, max_serve = 0;
  std::uint64_t untouched = 0, during = 0;
  for (const auto& q : h.replica_requests) {
    if (touching.count(q.read_id) || !q.ready || !q.served) continue;
    ++untouched;
    max_wait = std::max(max_wait, *q.ready - q.arrived);
    max_serve = std::max(max_serve, *q.served - q.arrived);
    if (q.arrived >= slow->begin && q.arrived <= *slow->end) ++during;
  }
  os << "; " << untouched << " untouched replica requests (" << during << " while the slow txn was open): max wait "
     << fmt("%.1f", ms(max_wait)) << " ms <= catch-up " << fmt("%.1f", ms(catch_up)) << " ms, max serve "
     << fmt("%.1f", ms(max_serve)) << " ms, coupled to slow txn " << coupled.size() << "; " << touching.size()
     << " reads touched slow keys, " << pushes_to_slow << " pushes to it";
  r.pass &= untouched > 0 && during > 0 && coupled.empty() && max_wait <= catch_up && max_serve < hold;
  r.detail = os.str();
  return r;
}

Result visibility_shape() {
  Run x = run("visibility", 1);
  const Scenario& s = x.scenario;
  VisibilityReport rep = measure_visibility(x.history);
  const Nanos I = s.epoch_interval;
  const Nanos bound =
      static_cast<Nanos>(static_cast<double>(I + s.network.matrix.max_one_way() + cut_slack(s)) * 1.2);
  PeriodEstimate p = dominant_period(rep.samples, I / 2, I * 3 / 2);
  Result r;
  const bool period_ok = p.found && p.period * 10 >= I * 9 && p.period * 10 <= I * 11;
  r.pass = !rep.samples.empty() && rep.unresolved == 0 && rep.max <= bound && period_ok;
  std::ostringstream os;
  os << rep.samples.size() << " commits, delay max " << fmt("%.1f", ms(rep.max)) << " ms (bound "
     << fmt("%.1f", ms(bound)) << " ms), p50 " << fmt("%.1f", ms(rep.p50)) << " p99 " << fmt("%.1f", ms(rep.p99))
     << " ms, unresolved " << rep.unresolved << "; period " << fmt("%.1f", ms(p.period)) << " ms (autocorr "
     << fmt("%.2f", p.peak) << ")";
  r.detail = os.str();
  return r;
}

Result batching() {
  TsBenchConfig cfg;
  cfg.ts.ttl = 100_us;
  cfg.ts.step = 10;
  cfg.ts.epsilon = 100_us;
  cfg.ts.max_drift = 200e-6;
  TsBenchResult b = bench_timestamps(cfg);
  cfg.ts.mode = tsbatch::Mode::Strawman;
  TsBenchResult straw = bench_timestamps(cfg);
  Result r;
  r.pass = b.local_ratio >= 0.999 && b.stats.max_capacity == 10000 && b.failed == 0;
  std::ostringstream os;
  os << b.stats.requests << " requests, " << fmt("%.5f", b.local_ratio) << " served locally, " << b.stats.oracle_calls
     << " oracle calls, batch capacity " << b.stats.max_capacity << "; mean latency "
     << fmt("%.0f", b.mean_latency_ns) << " ns vs strawman " << fmt("%.0f", straw.mean_latency_ns) << " ns";
  r.detail = os.str();
  return r;
}

Result durability() {
  run("crash_mix", 1);
  run("crash_mix", 2);
  Result r;
  r.pass = totals.fault_runs >= 22 && totals.durability_violations == 0;
  r.detail = std::to_string(totals.fault_runs) + " fault runs, " + std::to_string(totals.durability_checked) +
             " txns checked, " + std::to_string(totals.durability_violations) + " violations";
  if (!totals.durability_detail.empty()) r.detail += "; " + totals.durability_detail;
  return r;
}

Result deadlocks() {
  Result r;
  r.pass = totals.deadlock_violations == 0 && totals.wait_edges > 0;
  r.detail = std::to_string(totals.runs) + " runs, " + std::to_string(totals.wait_edges) + " wait edges, " +
             std::to_string(totals.deadlock_violations) + " cycles";
  if (!totals.deadlock_detail.empty()) r.detail += "; " + totals.deadlock_detail;
  return r;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    Result (*fn)();
  };
  // Deadlock freedom is reported last: it aggregates every other run.
  const Item items[] = {
      {1, "property 1 sweep", property1_sweep},
      {2, "strict serializability under faults", strict_serializability_sweep},
      {3, "checker self-validation", checker_self_validation},
      {4, "zero write-write aborts", blind_writes},
      {6, "epoch cuts after promised ends", epoch_cuts},
      {7, "atomic visibility, no blocking by slow commit", slow_commit},
      {8, "visibility delay bound and sawtooth", visibility_shape},
      {9, "timestamp batching", batching},
      {10, "durability and fencing", durability},
      {5, "deadlock freedom", deadlocks},
  };
  std::map<int, std::string> lines;
  int failed = 0;
  for (const Item& it : items) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = it.fn();
    } catch (const std::exception& e) {
      r = Result{false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !r.pass;
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << " [" << it.id << "] " << it.name << ": " << r.detail << " ("
       << fmt("%.1f", secs) << " s)";
    std::cerr << os.str() << std::endl;
    lines[it.id] = os.str();
  }
  std::cout << "\n";
  for (const auto& [id, line] : lines) std::cout << line << "\n";
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
