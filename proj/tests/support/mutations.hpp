#pragma once

#include <optional>
#include <string>

#include "gcq/epq.hpp"

namespace gcqtest {

using namespace gcq;

// Replaces the first input or branching on the spine of p, below any session
// start, by its continuation.
ProcPtr drop_first_input(const ProcPtr& p);

// Drops the first input of the named thread.
Network drop_receiver(Network n, const std::string& thread);

// Drops the first input of the first component that has one.
std::optional<Network> drop_some_receiver(const Network& n);

// Exchanges labels a and b in every selection reachable through starts and
// conditionals.
ProcPtr swap_labels(const ProcPtr& p, const Label& a, const Label& b);
Network swap_labels(Network n, const std::string& thread, const Label& a, const Label& b);

}  // namespace gcqtest
