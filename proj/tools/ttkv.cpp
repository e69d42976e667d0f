#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "ttkv/harness/bench.hpp"
#include "ttkv/harness/checkers.hpp"
#include "ttkv/harness/cluster.hpp"
#include "ttkv/harness/visibility.hpp"

using namespace ttkv;

namespace {

int print_verdicts(const std::vector<harness::Verdict>& vs) {
  int rc = 0;
  for (const auto& v : vs) {
    std::cout << std::left << std::setw(24) << v.property << (v.pass ? "pass" : "FAIL") << "  checked=" << v.checked
              << " violations=" << v.violations;
    if (!v.detail.empty()) std::cout << "  " << v.detail;
    if (!v.pass && !v.witness.empty()) {
      std::cout << "  witness:";
      for (const auto& t : v.witness) std::cout << ' ' << t.to_string();
    }
    std::cout << '\n';
    if (!v.pass) rc = 1;
  }
  return rc;
}

void print_visibility(const harness::History& h, const std::string& csv) {
  auto rep = harness::measure_visibility(h);
  const Nanos interval = h.header.epoch_interval;
  auto period = harness::dominant_period(rep.samples, interval / 2, interval * 3 / 2);
  std::cout << "visibility  samples=" << rep.samples.size() << " unresolved=" << rep.unresolved
            << " max_ms=" << rep.max / 1e6 << " p50_ms=" << rep.p50 / 1e6 << " p90_ms=" << rep.p90 / 1e6
            << " p99_ms=" << rep.p99 / 1e6;
  if (period.found) std::cout << " period_ms=" << period.period / 1e6 << " autocorr=" << period.peak;
  std::cout << '\n';
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << "commit_ms,delay_ms,epoch,txn\n";
    for (const auto& s : rep.samples)
      out << s.committed_at / 1e6 << ',' << s.delay / 1e6 << ',' << s.epoch << ',' << s.txn.to_string() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttkv: simulated multi-region transactional key-value store"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write its trace");
  std::string scenario_path, trace_out;
  std::optional<std::uint64_t> seed;
  std::optional<double> until_ms;
  bool run_check = false;
  run->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--until-ms", until_ms, "Hard stop in virtual milliseconds");
  run->add_option("--trace", trace_out, "Write the JSONL trace here");
  run->add_flag("--check", run_check, "Run every checker on the result");

  auto* check = app.add_subcommand("check", "Check a recorded trace");
  std::string trace_in, property = "all", csv;
  check->add_option("--trace", trace_in, "JSONL trace")->required();
  check->add_option("--property", property, "Property to check")
      ->check(CLI::IsMember({"all", "ss", "replica", "visibility", "property1", "property2", "deadlock", "durability"}));
  check->add_option("--csv", csv, "Write the visibility series as CSV");

  auto* bench = app.add_subcommand("bench-ts", "Timestamp service micro-benchmark");
  std::string mode = "batched";
  harness::TsBenchConfig bcfg;
  double duration_ms = 100, ttl_us = 100, eps_us = 100, rtt_us = 18;
  bench->add_option("--mode", mode)->check(CLI::IsMember({"batched", "strawman"}));
  bench->add_option("--rate", bcfg.rate, "Requests per second");
  bench->add_option("--duration-ms", duration_ms);
  bench->add_option("--ttl-us", ttl_us);
  bench->add_option("--step-ns", bcfg.ts.step);
  bench->add_option("--epsilon-us", eps_us);
  bench->add_option("--oracle-rtt-us", rtt_us);
  bench->add_option("--seed", bcfg.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      harness::Scenario s = harness::Scenario::load(scenario_path);
      if (seed) s.seed = *seed;
      if (until_ms) s.until = static_cast<Nanos>(*until_ms * 1e6);
      auto t0 = std::chrono::steady_clock::now();
      harness::Cluster cluster(s);
      harness::RunSummary r = cluster.run();
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << "scenario=" << s.name << " seed=" << s.seed << " virtual_ms=" << r.finished_at / 1e6
                << " events=" << r.events << " committed=" << r.committed << " aborted=" << r.aborted
                << " completed=" << (r.completed ? "yes" : "no") << " wall_s=" << wall << '\n';
      if (!trace_out.empty()) trace::save(trace_out, cluster.trace());
      if (run_check) {
        auto h = harness::History::from_trace(cluster.trace());
        int rc = print_verdicts(harness::check_all(h));
        print_visibility(h, "");
        return rc;
      }
      return 0;
    }
    if (*check) {
      auto h = harness::History::from_trace(trace::load(trace_in));
      int rc = 0;
      if (property == "all") {
        rc = print_verdicts(harness::check_all(h));
        print_visibility(h, csv);
      } else if (property == "ss") {
        rc = print_verdicts({harness::check_strict_serializability(h)});
      } else if (property == "replica") {
        rc = print_verdicts({harness::check_replica_consistency(h)});
      } else if (property == "property1") {
        rc = print_verdicts({harness::check_property1(h)});
      } else if (property == "property2") {
        rc = print_verdicts({harness::check_property2(h)});
      } else if (property == "deadlock") {
        rc = print_verdicts({harness::check_deadlock_freedom(h)});
      } else if (property == "durability") {
        rc = print_verdicts({harness::check_durability(h)});
      } else {
        print_visibility(h, csv);
      }
      return rc;
    }
    if (*bench) {
      bcfg.ts.mode = tsbatch::parse_mode(mode);
      bcfg.ts.ttl = static_cast<Nanos>(ttl_us * 1e3);
      bcfg.ts.epsilon = static_cast<Nanos>(eps_us * 1e3);
      bcfg.duration = static_cast<Nanos>(duration_ms * 1e6);
      bcfg.oracle_rtt = static_cast<Nanos>(rtt_us * 1e3);
      auto r = harness::bench_timestamps(bcfg);
      std::cout << "mode=" << mode << " requests=" << r.stats.requests << " granted=" << r.granted
                << " failed=" << r.failed << " local=" << r.stats.local << " oracle_calls=" << r.stats.oracle_calls
                << " local_ratio=" << std::setprecision(6) << r.local_ratio << " batch_capacity=" << r.stats.max_capacity
                << " mean_latency_ns=" << r.mean_latency_ns << " p99_latency_ns=" << r.p99_latency
                << " throughput_per_s=" << r.throughput << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
