#include "ttkv/replication/storage.hpp"

#include <filesystem>
#include <sstream>

namespace ttkv::replication {

std::string describe(const LogEntry& e) {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IntentEntry>) {
          os << "intent key=" << v.key << " txn=" << v.intent.txn.to_string() << " ts=" << v.intent.ts.to_string()
             << " rec=" << v.intent.recorder << " epoch=" << v.intent.logged_epoch;
        } else if constexpr (std::is_same_v<T, FinalizeEntry>) {
          os << "finalize txn=" << v.txn.to_string() << ' ' << to_string(v.decision) << " epoch=" << v.epoch;
        } else if constexpr (std::is_same_v<T, EpochCutEntry>) {
          os << "cut epoch=" << v.epoch;
        } else if constexpr (std::is_same_v<T, TxnRegisteredEntry>) {
          os << "registered txn=" << v.txn.to_string();
        } else {
          os << "record txn=" << v.txn.to_string() << ' ' << to_string(v.decision) << " epoch=" << v.epoch;
        }
      },
      e);
  return os.str();
}

StreamId SharedStorage::open(const std::string& name) {
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  StreamId id = static_cast<StreamId>(streams_.size());
  streams_.push_back(Stream{name, {}, {}, nullptr});
  by_name_[name] = id;
  if (mirror_dir_) {
    std::string file = name;
    for (char& c : file)
      if (c == '/') c = '_';
    streams_.back().mirror = std::make_unique<std::ofstream>(*mirror_dir_ + "/" + file + ".log");
  }
  return id;
}

std::optional<std::uint64_t> SharedStorage::compare_and_swap(StreamId s, std::uint64_t expected, NodeId owner) {
  Stream& st = streams_.at(s);
  if (st.member.generation != expected) return std::nullopt;
  st.member.generation = expected + 1;
  st.member.owner = owner;
  return st.member.generation;
}

std::variant<std::uint64_t, Fenced> SharedStorage::append(StreamId s, std::uint64_t generation, LogEntry entry) {
  Stream& st = streams_.at(s);
  if (generation != st.member.generation) return Fenced{};
  if (st.mirror) *st.mirror << describe(entry) << '\n';
  st.log.push_back(std::move(entry));
  return static_cast<std::uint64_t>(st.log.size() - 1);
}

void SharedStorage::mirror_to(const std::string& dir) {
  std::filesystem::create_directories(dir);
  mirror_dir_ = dir;
}

}  // namespace ttkv::replication
