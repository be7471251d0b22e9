#pragma once

#include <cstddef>
#include <string>

#include "gcq/session_check.hpp"

namespace gcqtest {

using namespace gcq;

struct MetaResult {
  bool ok = true;
  std::size_t states = 0;       // distinct configurations visited
  std::size_t transitions = 0;  // transitions checked
  std::string failure;
};

// Explores every reachable configuration of a well-typed program and re-checks
// both judgments after each transition. The session environment follows the
// labels: init extends ownerships and Delta, communication steps Delta.
MetaResult check_preservation(const Program& p, std::size_t max_states = 5000);

// In every reachable non-terminal configuration and for every availability set
// under which each pending collective can still meet its quality, some
// transition is enabled.
MetaResult check_progress(const Program& p, std::size_t max_states = 5000);

// A reachable configuration with the context its state satisfies.
struct TypedPair {
  Configuration conf;
  std::map<CapabilityState::Key, Role> roles;
  IllContext psi;
};

std::vector<TypedPair> reachable_pairs(const Program& p, std::size_t max_states = 5000);

}  // namespace gcqtest
