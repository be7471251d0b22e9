#include "gcq/state.hpp"

#include <algorithm>

namespace gcq {

CapSet exchange(const CapSet& x, const CapSet& y, const CapSet& z) {
  if (!std::includes(z.begin(), z.end(), x.begin(), x.end())) return z;
  CapSet out;
  std::set_difference(z.begin(), z.end(), x.begin(), x.end(), std::inserter(out, out.end()));
  out.insert(y.begin(), y.end());
  return out;
}

CapSet CapabilityState::lookup(const Thread& t, const SessionKey& k) const {
  auto it = entries_.find({t, k});
  return it == entries_.end() ? CapSet{} : it->second;
}

void CapabilityState::set(const Thread& t, const SessionKey& k, CapSet caps) { entries_[{t, k}] = std::move(caps); }

std::string print_caps(const CapSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ",";
    out += a.str();
    first = false;
  }
  return out + "}";
}

std::string CapabilityState::to_string() const {
  std::string out = "[";
  bool first = true;
  for (const auto& [key, caps] : entries_) {
    if (!first) out += ", ";
    out += "(" + key.first.str() + "," + key.second.str() + ")->" + print_caps(caps);
    first = false;
  }
  return out + "]";
}

CapabilityState state_update(const CapabilityState& sigma, const CapabilityState& sigmaP) {
  CapabilityState out = sigma;
  for (const auto& [key, caps] : sigmaP.entries()) out.set(key.first, key.second, caps);
  return out;
}

}  // namespace gcq
