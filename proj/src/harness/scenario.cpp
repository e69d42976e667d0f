#include "ttkv/harness/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <yaml-cpp/yaml.h>

namespace ttkv::harness {

namespace {

Nanos ms(double v) { return static_cast<Nanos>(std::llround(v * 1e6)); }
Nanos us(double v) { return static_cast<Nanos>(std::llround(v * 1e3)); }

template <class T>
void get(const YAML::Node& n, const char* key, T& out) {
  if (n && n[key]) out = n[key].as<T>();
}

void get_ms(const YAML::Node& n, const char* key, Nanos& out) {
  if (n && n[key]) out = ms(n[key].as<double>());
}

void get_us(const YAML::Node& n, const char* key, Nanos& out) {
  if (n && n[key]) out = us(n[key].as<double>());
}

DriftMode parse_drift(const std::string& s) {
  if (s == "zero") return DriftMode::Zero;
  if (s == "random") return DriftMode::Random;
  if (s == "adversarial") return DriftMode::Adversarial;
  throw ConfigError("unknown drift_mode: " + s);
}

ReplicaPlacement parse_replicas(const std::string& s) {
  if (s == "none") return ReplicaPlacement::None;
  if (s == "other") return ReplicaPlacement::Other;
  if (s == "all") return ReplicaPlacement::All;
  throw ConfigError("unknown replicas placement: " + s);
}

FaultSpec::Kind parse_fault(const std::string& s) {
  if (s == "crash") return FaultSpec::Kind::Crash;
  if (s == "pause") return FaultSpec::Kind::Pause;
  if (s == "oracle_outage") return FaultSpec::Kind::OracleOutage;
  throw ConfigError("unknown fault kind: " + s);
}

}  // namespace

ProtocolConfig Scenario::protocol() const {
  ProtocolConfig p;
  p.ts.mode = ts_mode;
  p.ts.ttl = ttl;
  p.ts.step = step;
  p.ts.epsilon = clocks.epsilon;
  p.ts.max_drift = clocks.max_drift;
  p.epochs.interval = epoch_interval;
  p.heartbeat_interval = heartbeat_interval;
  p.heartbeat_timeout = heartbeat_timeout;
  p.rpc_timeout = rpc_timeout;
  p.rpc_sweep = rpc_sweep;
  p.ship_interval = ship_interval;
  p.ship_rto = ship_rto;
  p.lease = lease;
  return p;
}

void Scenario::validate() const {
  protocol().validate();
  network.validate();
  workload.validate();
  if (topology.partitions == 0) throw ConfigError("topology.partitions must be positive");
  if (topology.clients_per_coordinator == 0) throw ConfigError("clients_per_coordinator must be positive");
  for (const auto& [node, d] : clocks.overrides)
    if (std::abs(d) > clocks.max_drift) throw ConfigError("drift override for " + node + " exceeds max_drift");
  if (reads.reads > 0 && replicas == ReplicaPlacement::None)
    throw ConfigError("replica reads need replicas");
  for (const FaultSpec& f : faults) {
    if (f.until && *f.until < f.at) throw ConfigError("fault ends before it starts: " + f.target);
    if (f.kind == FaultSpec::Kind::Crash && f.until && f.target.rfind("data.", 0) == 0 && *f.until - f.at < lease)
      throw ConfigError("data node " + f.target + " restarted before its lease expired");
    if (f.kind == FaultSpec::Kind::Crash && f.target.rfind("replica.", 0) == 0)
      throw ConfigError("replica crashes are not supported");
  }
}

Scenario Scenario::parse(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (!root.IsNull() && !root.IsMap()) throw ConfigError("scenario: top level must be a map");
  Scenario s;
  try {
    get(root, "name", s.name);
    get(root, "seed", s.seed);

    if (auto c = root["clocks"]) {
      get_us(c, "epsilon_us", s.clocks.epsilon);
      if (c["max_drift_ppm"]) s.clocks.max_drift = c["max_drift_ppm"].as<double>() * 1e-6;
      if (c["drift_mode"]) s.clocks.drift_mode = parse_drift(c["drift_mode"].as<std::string>());
      if (c["oracle_placement"])
        s.clocks.oracle_placement = truetime::parse_placement(c["oracle_placement"].as<std::string>());
      if (auto o = c["drift_overrides_ppm"])
        for (const auto& kv : o) s.clocks.overrides[kv.first.as<std::string>()] = kv.second.as<double>() * 1e-6;
    }

    if (auto t = root["timestamps"]) {
      if (t["mode"]) s.ts_mode = tsbatch::parse_mode(t["mode"].as<std::string>());
      get_us(t, "ttl_us", s.ttl);
      get(t, "step_ns", s.step);
    }

    if (auto n = root["network"]) {
      if (n["regions"] || n["latency_matrix_ms"]) {
        auto regions = n["regions"].as<std::vector<std::string>>();
        auto rtt = n["latency_matrix_ms"].as<std::vector<std::vector<double>>>();
        s.network.matrix = simnet::LatencyMatrix(regions, rtt);
      }
      if (n["jitter_pct"]) s.network.jitter = n["jitter_pct"].as<double>() / 100.0;
      get(n, "drop_prob", s.network.drop_prob);
      get(n, "reorder_prob", s.network.reorder_prob);
      get(n, "duplicate_prob", s.network.duplicate_prob);
      get_us(n, "oracle_rtt_us", s.network.oracle_rtt);
      if (auto parts = n["partitions"]) {
        for (const auto& p : parts) {
          simnet::PartitionWindow w;
          for (const auto& r : p["regions"]) w.side.push_back(s.network.matrix.region_index(r.as<std::string>()));
          w.from = ms(p["from_ms"].as<double>());
          w.to = ms(p["to_ms"].as<double>());
          s.network.partitions.push_back(w);
        }
      }
    }

    if (auto t = root["topology"]) {
      get(t, "partitions", s.topology.partitions);
      get(t, "coordinators_per_region", s.topology.coordinators_per_region);
      get(t, "clients_per_coordinator", s.topology.clients_per_coordinator);
    }

    if (auto e = root["epochs"]) get_ms(e, "epoch_interval_ms", s.epoch_interval);

    if (auto r = root["replication"]) {
      get_ms(r, "flush_latency_ms", s.flush_latency);
      get_ms(r, "lease_ms", s.lease);
      get_ms(r, "ship_interval_ms", s.ship_interval);
      get_ms(r, "ship_rto_ms", s.ship_rto);
      if (r["replicas"]) s.replicas = parse_replicas(r["replicas"].as<std::string>());
    }

    if (auto h = root["heartbeat"]) {
      get_ms(h, "interval_ms", s.heartbeat_interval);
      get_ms(h, "timeout_ms", s.heartbeat_timeout);
    }

    if (auto r = root["rpc"]) {
      get_ms(r, "timeout_ms", s.rpc_timeout);
      get_ms(r, "sweep_ms", s.rpc_sweep);
    }

    if (auto w = root["workload"]) {
      if (w["preset"]) s.workload.preset = parse_preset(w["preset"].as<std::string>());
      get(w, "ops_per_txn", s.workload.ops_per_txn);
      get(w, "write_ratio", s.workload.write_ratio);
      get(w, "key_count", s.workload.key_count);
      get(w, "zipf_theta", s.workload.zipf_theta);
      get(w, "txn_count", s.workload.txn_count);
      get(w, "slow_epochs", s.workload.slow_epochs);
      get(w, "slow_index", s.workload.slow_index);
    }

    if (auto r = root["replica_reads"]) {
      get(r, "reads_per_region", s.reads.reads);
      get(r, "keys_per_read", s.reads.keys_per_read);
      get(r, "concurrency", s.reads.concurrency);
      get_ms(r, "think_ms", s.reads.think);
      get(r, "slow_key_prob", s.reads.slow_key_prob);
    }

    if (auto f = root["faults"]) {
      for (const auto& item : f) {
        FaultSpec spec;
        spec.kind = parse_fault(item["kind"].as<std::string>());
        spec.target = item[spec.kind == FaultSpec::Kind::OracleOutage ? "region" : "node"].as<std::string>();
        spec.at = ms(item["at_ms"].as<double>());
        for (const char* k : {"restart_ms", "resume_ms", "until_ms"})
          if (item[k]) spec.until = ms(item[k].as<double>());
        s.faults.push_back(spec);
      }
    }

    if (auto r = root["run"]) {
      get_ms(r, "drain_ms", s.drain);
      get_ms(r, "until_ms", s.until);
      get(r, "stop_when_done", s.stop_when_done);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace ttkv::harness
