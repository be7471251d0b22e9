#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcq/choreography.hpp"
#include "gcq/oracle.hpp"
#include "gcq/state.hpp"

namespace gcq {

struct GLabel {
  enum class Kind { Tau, Init, Bcast, Reduce, Select };
  Kind kind = Kind::Tau;
  // Instantiated interaction (fresh names, closed expressions); absent for tau.
  std::optional<Interaction> act;
  std::vector<Thread> chosen;  // J, in participant order
  std::vector<Thread> absent;
  OptValue value;                    // bcast payload or reduce result
  std::vector<OptValue> contributions;  // reduce: one slot per sender, none outside J
  Thread tau_at;                     // tau: deciding thread
  bool tau_then = true;              // tau: branch taken

  SessionKey session() const { return act ? interaction_session(*act) : SessionKey(); }
};

std::string label_kind(const GLabel& l);
std::string print_glabel(const GLabel& l);
bool glabel_equal(const GLabel& a, const GLabel& b);

struct Configuration {
  CapabilityState sigma;
  ChorPtr chor;                        // restriction-free
  std::vector<std::string> restricted; // binders floated outward
  std::set<std::string> used;          // names in use at runtime (freshness source)
};

// Floats restrictions outward and seeds the used-name set.
Configuration make_configuration(const ChorPtr& c, CapabilityState sigma = {});

struct GTransition {
  GLabel label;
  Configuration next;
};

// Transitions of the configuration, modulo swap. With an oracle, the chosen
// subset J is drawn from the threads the oracle reports available.
std::vector<GTransition> enabled(const Configuration& conf, const AvailabilityOracle* oracle = nullptr,
                                 std::size_t step_index = 0);

struct Stuck : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PolicyKind { Maximal, Random };

struct Policy {
  PolicyKind kind = PolicyKind::Maximal;
  std::uint64_t seed = 0;
};

GTransition step(const Configuration& conf, std::size_t choice);

enum class Verdict { Completed, Stuck, Budget };
const char* verdict_name(Verdict v);

struct GlobalTrace {
  std::vector<GLabel> labels;
  Configuration final;
  Verdict verdict = Verdict::Completed;
};

GlobalTrace run(const Configuration& conf, const AvailabilityOracle& oracle, const Policy& policy,
                std::size_t max_steps);

bool swap_equal(const ChorPtr& a, const ChorPtr& b);
// Terms one swap-rule rewrite away (either direction, any position).
std::vector<ChorPtr> swap_neighbors(const ChorPtr& c);

nlohmann::json value_json(const OptValue& v);
nlohmann::json glabel_json(const GLabel& l, std::size_t step);

// Heads of a choreography modulo swap; exposed for the checkers.
struct Head {
  bool tau = false;
  Interaction act{Init{}};
  ChorPtr residual;  // comm: continuation with the head removed
  ExprPtr guard;     // tau
  Thread at;         // tau
  ChorPtr then_residual, else_residual;
};
std::vector<Head> chor_heads(const ChorPtr& c);

}  // namespace gcq
