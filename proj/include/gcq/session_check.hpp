#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gcq/cap_check.hpp"
#include "gcq/global_sem.hpp"
#include "gcq/global_type.hpp"
#include "gcq/parser.hpp"

namespace gcq {

struct ServiceType {
  GTypePtr type;
  std::vector<Role> actives;  // empty with has_split = false
  std::vector<Role> services;
  bool has_split = false;
};

// Gamma: service types, variable sorts, ownerships.
struct SessionEnv {
  std::map<ServiceName, ServiceType> services;
  std::map<VarAt, Sort> vars;
  std::map<std::pair<Thread, SessionKey>, Role> owners;
};

// Delta: protocol state per running session.
using DeltaEnv = std::map<SessionKey, GTypePtr>;

SessionEnv env_from_program(const Program& p);

struct SessionFailure {
  // UnknownService, ServiceSplitMismatch, FreshnessViolation, UnknownSession,
  // RoleNotOwned, SortMismatch, LabelNotOffered, ProtocolMismatch,
  // NotAProposition, ProtocolResidue
  std::string code;
  std::string interaction;
  std::string message;
};

struct SessionReport {
  bool ok = true;
  std::vector<SessionFailure> failures;
};

nlohmann::json session_report_json(const SessionReport& r);

// Gamma |- C |> Delta.
SessionReport check_session_only(const SessionEnv& gamma, const ChorPtr& c, const DeltaEnv& delta = {});

// Rule TG: capability judgment and session judgment, checked independently.
struct FullReport {
  CapReport caps;
  SessionReport session;
  bool ok() const { return caps.ok && session.ok; }
};
FullReport check_session(const SessionEnv& gamma, const IllContext& psi, const ChorPtr& c, const DeltaEnv& delta = {});

struct Untypable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// k:alpha for a bcast/reduce/select label; nullopt for init and tau.
std::optional<std::pair<SessionKey, TypeLabel>> type_label(const GLabel& l, const SessionEnv& gamma);

// Every residual of g after alpha, modulo type swaps.
std::vector<GTypePtr> gtype_residuals(const GTypePtr& g, const TypeLabel& alpha);

}  // namespace gcq
