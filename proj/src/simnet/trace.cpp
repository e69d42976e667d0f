#include "ttkv/simnet/trace.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

NLOHMANN_JSON_NAMESPACE_BEGIN
template <typename T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v)
      j = *v;
    else
      j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null())
      v.reset();
    else
      v = j.get<T>();
  }
};
NLOHMANN_JSON_NAMESPACE_END

namespace ttkv {

void to_json(nlohmann::json& j, const Timestamp& t) { j = nlohmann::json::array({t.nanos, t.server_id, t.issuer}); }
void from_json(const nlohmann::json& j, Timestamp& t) {
  t.nanos = j.at(0).get<Nanos>();
  t.server_id = j.at(1).get<ServerId>();
  t.issuer = j.at(2).get<NodeId>();
}
void to_json(nlohmann::json& j, const TxnId& t) { j = t.to_string(); }
void from_json(const nlohmann::json& j, TxnId& t) { t = TxnId::parse(j.get<std::string>()); }

namespace trace {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OracleIssued, server, earliest, latest)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TxnBegin, txn, tag)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TsAssigned, txn, ts)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReadDone, txn, index, key, partition, version, writer)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WriteDone, txn, index, key, partition, proposed_epoch)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CommitRequested, txn)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TxnCommitted, txn, epoch)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TxnAborted, txn, reason)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RecordDecided, txn, node, committed, epoch)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WaitEdge, waiter, holder)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EpochCut, node, epoch)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplayedEpoch, node, partition, epoch)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicaReqArrived, read_id, node)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicaReqReady, read_id, node)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicaReqServed, read_id, node, pushes)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicaReadIssued, read_id, reader)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(KeyRead, key, version, writer)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicaRead, read_id, reader, ts_read, view, keys)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NodeDown, node)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NodeUp, node)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Takeover, node, role, generation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Retired, node, role)

namespace {

constexpr const char* kNames[] = {
    "oracle_issued",  "txn_begin",     "ts_assigned",   "read_done",          "write_done",    "commit_requested",
    "txn_committed",  "txn_aborted",   "record_decided", "wait_edge",         "epoch_cut",     "replayed_epoch",
    "replica_req_arrived", "replica_req_ready", "replica_req_served", "replica_read_issued", "replica_read",
    "node_down",      "node_up",       "takeover",      "retired",
};
static_assert(std::size(kNames) == std::variant_size_v<Body>);

template <std::size_t I = 0>
Body body_from(std::size_t index, const nlohmann::json& j) {
  if constexpr (I < std::variant_size_v<Body>) {
    if (index == I) return Body{std::in_place_index<I>, j.get<std::variant_alternative_t<I, Body>>()};
    return body_from<I + 1>(index, j);
  } else {
    throw std::runtime_error("bad event index");
  }
}

}  // namespace

const char* type_name(const Body& b) { return kNames[b.index()]; }

void write_jsonl(std::ostream& out, const Trace& trace) {
  nlohmann::json h{{"schema", "ttkv-trace"},
                   {"version", 1},
                   {"seed", trace.header.seed},
                   {"epoch_interval_ns", trace.header.epoch_interval},
                   {"epsilon_ns", trace.header.epsilon},
                   {"max_drift", trace.header.max_drift},
                   {"scenario", trace.header.scenario}};
  out << h.dump() << '\n';
  for (const Event& e : trace.events) {
    nlohmann::json j;
    std::visit([&](const auto& v) { j = v; }, e.body);
    j["t"] = e.at;
    j["type"] = kNames[e.body.index()];
    out << j.dump() << '\n';
  }
}

Trace read_jsonl(std::istream& in) {
  Trace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace");
  auto h = nlohmann::json::parse(line);
  if (h.value("schema", "") != "ttkv-trace") throw std::runtime_error("not a ttkv trace");
  if (h.value("version", 0) != 1) throw std::runtime_error("unsupported trace version");
  trace.header.seed = h.at("seed").get<std::uint64_t>();
  trace.header.epoch_interval = h.at("epoch_interval_ns").get<Nanos>();
  trace.header.epsilon = h.at("epsilon_ns").get<Nanos>();
  trace.header.max_drift = h.at("max_drift").get<double>();
  trace.header.scenario = h.value("scenario", "");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < std::size(kNames); ++i) index[kNames[i]] = i;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    auto it = index.find(j.at("type").get<std::string>());
    if (it == index.end()) throw std::runtime_error("unknown event type in trace");
    trace.events.push_back(Event{j.at("t").get<Nanos>(), body_from(it->second, j)});
  }
  return trace;
}

void save(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_jsonl(out, trace);
}

Trace load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_jsonl(in);
}

}  // namespace trace
}  // namespace ttkv
