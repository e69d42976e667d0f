#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace ttkv {

/// Nanoseconds. Used both for true instants and for local-clock durations.
using Nanos = std::uint64_t;
using NodeId = std::uint32_t;
using RegionId = std::uint32_t;
using ServerId = std::uint32_t;
using PartitionId = std::uint32_t;
using Epoch = std::uint64_t;
using Key = std::uint64_t;
using Value = std::string;

inline constexpr NodeId kNoNode = 0xffffffffu;

constexpr Nanos operator""_us(unsigned long long v) { return v * 1000ull; }
constexpr Nanos operator""_ms(unsigned long long v) { return v * 1000'000ull; }

/// Thrown for invalid scenario or component configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A globally comparable transaction timestamp. Ordered by nanos, then by the
/// issuing oracle server, then by the issuing node.
struct Timestamp {
  Nanos nanos = 0;
  ServerId server_id = 0;
  NodeId issuer = 0;

  auto operator<=>(const Timestamp&) const = default;
  std::string to_string() const;
};

enum class Ordering { Less, Equal, Greater };

Ordering compare(const Timestamp& a, const Timestamp& b);

/// (coordinator, incarnation, sequence). A restarted coordinator bumps its
/// incarnation so identifiers are never reused.
struct TxnId {
  NodeId coordinator = 0;
  std::uint32_t incarnation = 0;
  std::uint64_t seq = 0;

  auto operator<=>(const TxnId&) const = default;
  std::string to_string() const;
  static TxnId parse(const std::string& text);
};

enum class Decision : std::uint8_t { Commit, Abort };

const char* to_string(Decision d);

}  // namespace ttkv

template <>
struct std::hash<ttkv::TxnId> {
  std::size_t operator()(const ttkv::TxnId& t) const noexcept {
    std::size_t h = std::hash<std::uint64_t>{}(t.seq);
    h ^= std::hash<std::uint64_t>{}((std::uint64_t{t.coordinator} << 32) | t.incarnation) +
         0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};
