#include "ttkv/core.hpp"

#include <sstream>

namespace ttkv {

std::string Timestamp::to_string() const {
  std::ostringstream os;
  os << nanos << '/' << server_id << '/' << issuer;
  return os.str();
}

Ordering compare(const Timestamp& a, const Timestamp& b) {
  auto c = a <=> b;
  if (c < 0) return Ordering::Less;
  if (c > 0) return Ordering::Greater;
  return Ordering::Equal;
}

std::string TxnId::to_string() const {
  std::ostringstream os;
  os << coordinator << ':' << incarnation << ':' << seq;
  return os.str();
}

TxnId TxnId::parse(const std::string& text) {
  TxnId id;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> id.coordinator >> c1 >> id.incarnation >> c2 >> id.seq) || c1 != ':' || c2 != ':') {
    throw std::invalid_argument("malformed txn id: " + text);
  }
  return id;
}

const char* to_string(Decision d) { return d == Decision::Commit ? "commit" : "abort"; }

}  // namespace ttkv
