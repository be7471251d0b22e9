#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcq/choreography.hpp"
#include "gcq/ill.hpp"
#include "gcq/state.hpp"

namespace gcq {

struct CapFailure {
  // NoSatisfyingSubset, CapabilityUnderivable, FreshnessViolation,
  // TooManyParticipants, ContextHasLolli
  std::string code;
  std::string interaction;
  std::vector<Thread> subset;        // the J that failed
  std::vector<std::string> missing;  // goal atoms absent from the context
  std::string sequent;               // failing prover query
  std::string message;
};

struct CapReport {
  bool ok = true;
  std::vector<CapFailure> failures;
};

nlohmann::json cap_report_json(const CapReport& r);

// Maximum participants per collective interaction.
inline constexpr std::size_t kMaxParticipants = 16;

// Psi |- C. Binders are renamed apart from each other and from Psi first.
CapReport check_capabilities(const IllContext& psi, const ChorPtr& c);

// Ownership atoms an init adds to the context.
IllContext init_ownerships(const Init& init);

bool state_satisfies(const CapabilityState& sigma, const FormulaPtr& f);
bool state_satisfies(const CapabilityState& sigma, const IllContext& psi);

// One ownership atom per state entry; entries without a known role are skipped.
IllContext state_context(const CapabilityState& sigma, const std::map<CapabilityState::Key, Role>& roles);

}  // namespace gcq
