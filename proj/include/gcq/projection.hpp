#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcq/choreography.hpp"
#include "gcq/epq.hpp"
#include "gcq/global_sem.hpp"

namespace gcq {

struct NotMergeable : std::runtime_error {
  NotMergeable(std::string path, const std::string& reason)
      : std::runtime_error(reason + (path.empty() ? "" : " at " + path)), path(std::move(path)) {}
  std::string path;
};

struct ProjectionUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// P merge Q. Branchings on the same endpoint union their labels; equal
// prefixes merge their continuations; conditionals with the same guard merge
// branch-wise. Binders are aligned by renaming Q's to P's.
ProcPtr merge(const ProcPtr& p, const ProcPtr& q);
bool mergeable(const ProcPtr& p, const ProcPtr& q);

// Projection of a restriction-free choreography onto a thread. The first
// active of an init becomes the requester.
ProcPtr project_thread(const ChorPtr& c, const Thread& t);

// Service threads started on `a` with role `r`.
std::set<Thread> service_merge(const ChorPtr& c, const ServiceName& a, const Role& r);

// Endpoint projection of a configuration: one component per free thread, one
// empty queue per free session, one replicated group per (service, role).
Network epp(const Configuration& conf);
Network epp(const ChorPtr& c);

struct LinearityReport {
  bool ok = true;
  std::string first;   // earlier init
  std::string second;  // later init whose active is not causally after it
  std::string message;
};
LinearityReport check_linearity(const ChorPtr& c);

enum class PruneVerdict { Holds, Fails, Inconclusive };
const char* prune_verdict_name(PruneVerdict v);

// Garbage-collection and merge-absorption conditions of pruning.
bool prunes_structural(const Network& p, const Network& q);
// Full pruning: structural conditions plus bounded simulation of Q's
// transitions by P's.
PruneVerdict prunes(const Network& p, const Network& q, std::size_t depth = 12);

}  // namespace gcq
