#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcq/epq.hpp"
#include "gcq/global_sem.hpp"
#include "gcq/oracle.hpp"
#include "gcq/projection.hpp"

namespace gcq {

// Endpoint labels that realise a global label with its recorded subset J.
std::vector<ELabel> expected_labels(const GLabel& l);

// Which endpoint labels realise each global label.
struct LabelWitness {
  std::vector<std::vector<std::size_t>> groups;  // per global label, endpoint indices
  std::vector<std::vector<Thread>> subsets;      // per global label, the J used
};

// Decides whether the endpoint labels implement the global labels. J is
// existential: any quality-satisfying subset whose labels are present counts.
std::optional<LabelWitness> implements(const std::vector<GLabel>& globals, const std::vector<ELabel>& endpoints);

struct CosimOptions {
  std::size_t bound = 32;             // global transition depth
  std::size_t max_states = 200000;    // explored state pairs
  std::size_t completion_depth = 8;   // global steps searched to complete an endpoint step
};

struct Counterexample {
  std::string direction;  // "soundness" or "completeness"
  std::vector<GLabel> global_trace;
  std::vector<ELabel> endpoint_trace;
  std::string message;
};

enum class CosimVerdict { Pass, CounterexampleFound, BudgetExceeded };
const char* cosim_verdict_name(CosimVerdict v);

struct CosimReport {
  CosimVerdict verdict = CosimVerdict::Pass;
  bool soundness_ok = true;
  bool completeness_ok = true;
  std::size_t states = 0;
  std::size_t global_steps = 0;
  std::size_t endpoint_steps = 0;
  std::vector<Counterexample> counterexamples;  // at most one per direction
};

// Checks both directions of projection correctness by bounded exhaustive
// exploration. `network` replaces the projection of the initial configuration.
CosimReport cosimulate(const Configuration& conf, const std::optional<Network>& network = std::nullopt,
                       const CosimOptions& opts = {});
CosimReport cosimulate(const ChorPtr& c, const CosimOptions& opts = {});

enum class AvailabilityVerdict { Pass, StuckNetworkFound, BudgetExceeded };
const char* availability_verdict_name(AvailabilityVerdict v);

struct AvailabilityReport {
  AvailabilityVerdict verdict = AvailabilityVerdict::Pass;
  std::size_t states = 0;
  std::size_t oracles = 0;
  std::string oracle;            // oracle under which the stuck state was reached
  std::vector<ELabel> trace;     // path to the stuck state
  std::string stuck_network;
};

// Explores the network under each oracle. A state is stuck when it is not
// completed and has no transition even with every participant available.
AvailabilityReport availability_check(const Network& n, const std::vector<OraclePtr>& family, std::size_t bound = 128,
                                      std::size_t max_states = 200000);
AvailabilityReport availability_check(const ChorPtr& c, const std::vector<OraclePtr>& family, std::size_t bound = 128,
                                      std::size_t max_states = 200000);

nlohmann::json cosim_json(const CosimReport& r);
std::string cosim_junit(const CosimReport& r, const std::string& name);
nlohmann::json availability_json(const AvailabilityReport& r);
std::string availability_junit(const AvailabilityReport& r, const std::string& name);

}  // namespace gcq
