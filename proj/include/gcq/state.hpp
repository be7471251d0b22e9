#pragma once

#include <map>
#include <string>
#include <utility>

#include "gcq/choreography.hpp"

namespace gcq {

CapSet exchange(const CapSet& x, const CapSet& y, const CapSet& z);

class CapabilityState {
 public:
  using Key = std::pair<Thread, SessionKey>;

  CapSet lookup(const Thread& t, const SessionKey& k) const;
  void set(const Thread& t, const SessionKey& k, CapSet caps);
  const std::map<Key, CapSet>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const CapabilityState&) const = default;

  std::string to_string() const;

 private:
  std::map<Key, CapSet> entries_;
};

// sigmaP overrides sigma at shared keys.
CapabilityState state_update(const CapabilityState& sigma, const CapabilityState& sigmaP);

std::string print_caps(const CapSet& s);

}  // namespace gcq
