#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gcq/expr.hpp"
#include "gcq/global_sem.hpp"
#include "gcq/names.hpp"
#include "gcq/oracle.hpp"
#include "gcq/quality.hpp"
#include "gcq/value.hpp"

namespace gcq {

struct Proc;
using ProcPtr = std::shared_ptr<const Proc>;

struct Proc {
  // Session requester; `actives` starts with the requester's own role.
  struct Request {
    ServiceName service;
    std::vector<Role> actives;
    std::vector<Role> services;
    SessionKey key;
    ProcPtr cont;
  };
  struct Accept {
    ServiceName service;
    Role role;
    SessionKey key;
    bool replicated = false;
    ProcPtr cont;
  };
  // Quality broadcast.
  struct QOut {
    SessionKey key;
    Role from;
    std::vector<Role> to;
    Quality q;
    ExprPtr expr;
    ProcPtr cont;
  };
  struct In {
    SessionKey key;
    Role self;
    Role from;
    VarName var;
    ProcPtr cont;
  };
  // Quality reduce input.
  struct QIn {
    SessionKey key;
    std::vector<Role> from;
    Role self;
    Quality q;
    AggOp op;
    VarName var;
    ProcPtr cont;
  };
  struct Out {
    SessionKey key;
    Role self;
    Role to;
    ExprPtr expr;
    ProcPtr cont;
  };
  struct QSel {
    SessionKey key;
    Role from;
    std::vector<Role> to;
    Quality q;
    Label label;
    ProcPtr cont;
  };
  struct Branch {
    SessionKey key;
    Role self;
    Role from;
    std::map<Label, ProcPtr> branches;
  };
  // Runtime only.
  struct WaitOut {
    SessionKey key;
    Role from;
    std::vector<Role> to;
    ProcPtr cont;
  };
  struct WaitIn {
    SessionKey key;
    std::vector<Role> from;
    Role self;
    AggOp op;
    VarName var;
    ProcPtr cont;
  };
  struct If {
    ExprPtr guard;
    ProcPtr then_branch;
    ProcPtr else_branch;
  };
  struct End {};

  std::variant<End, Request, Accept, QOut, In, QIn, Out, QSel, Branch, WaitOut, WaitIn, If> node;

  bool is_end() const { return std::holds_alternative<End>(node); }
  bool is_replicated() const {
    auto* a = std::get_if<Accept>(&node);
    return a && a->replicated;
  }
};

namespace ep {
ProcPtr end();
ProcPtr make(decltype(Proc::node) node);
}  // namespace ep

bool proc_equal(const ProcPtr& a, const ProcPtr& b);
std::string print_proc(const ProcPtr& p);  // single line, .epq syntax
std::string print_proc_pretty(const ProcPtr& p, int indent = 0);

// P{sb/x}; stops under a binder of the same variable.
ProcPtr proc_subst(const ProcPtr& p, const VarName& x, const OptValue& v);
// Capture-avoiding renaming of a free session name.
ProcPtr proc_rename_session(const ProcPtr& p, const SessionKey& from, const SessionKey& to);
ProcPtr proc_rename_var(const ProcPtr& p, const VarName& from, const VarName& to);
std::set<SessionKey> proc_free_sessions(const ProcPtr& p);
std::set<ServiceName> proc_services(const ProcPtr& p);
std::set<std::string> proc_names(const ProcPtr& p);

// Queue messages. Outputs carry a value (broadcast) or a label (selection).
struct OutMsg {
  Role from;
  Quality q;
  std::vector<std::pair<Role, bool>> to;  // delivery flags
  bool is_select = false;
  OptValue value;
  Label label;
  bool operator==(const OutMsg&) const = default;
};

struct InMsg {
  struct Slot {
    Role role;
    bool done = false;
    OptValue value;
    bool operator==(const Slot&) const = default;
  };
  Quality q;
  std::vector<Slot> from;
  Role to;
  bool operator==(const InMsg&) const = default;
};

using QueueMsg = std::variant<OutMsg, InMsg>;
using Queue = std::vector<QueueMsg>;

// Whether two adjacent messages may be exchanged in a queue.
bool msgs_commute(const QueueMsg& a, const QueueMsg& b);
// Indices of messages that can be brought to the front.
std::vector<std::size_t> accessible(const Queue& q);
// Lexicographically least queue in the commutation class.
Queue canonical_queue(const Queue& q);
std::string print_msg(const QueueMsg& m);

struct Component {
  Thread thread;  // owning thread; for replicated services the source thread
  ProcPtr proc;
};

struct Network {
  std::vector<std::string> restricted;  // nu-bound names (session keys)
  std::vector<Component> components;
  std::map<SessionKey, Queue> queues;
  std::set<std::string> used;  // freshness source
};

struct ELabel {
  enum class Kind { Tau, Start, BcOut, BcIn, RdOut, RdIn, SelOut, SelIn, EnqUp, EnqDown };
  Kind kind = Kind::Tau;
  SessionKey key;
  // Start: service, active and service roles.
  ServiceName service;
  std::vector<Role> actives;
  std::vector<Role> services;
  // BcOut/BcIn/SelOut/SelIn/EnqUp: `one` is the sender. RdOut/RdIn/EnqDown:
  // `one` is the reduce receiver. `many` is the other side (a single role for
  // BcIn/SelIn/RdOut).
  Role one;
  std::vector<Role> many;
  Quality q;
  OptValue value;
  Label label;
  Thread at;  // acting component, informational
};

const char* elabel_kind_name(ELabel::Kind k);
// Equality on the observable fields (the acting thread is ignored).
bool elabel_equal(const ELabel& a, const ELabel& b);
std::string print_elabel(const ELabel& l);
nlohmann::json elabel_json(const ELabel& l, std::size_t step);

struct ETransition {
  ELabel label;
  Network next;
};

// Every transition of the network. The oracle gates inputs, reduce outputs and
// branchings; leaders and queue synchronisations are not gated. Transitions
// are ordered with queue releases last.
std::vector<ETransition> net_enabled(const Network& n, const AvailabilityOracle* oracle = nullptr,
                                     std::size_t step = 0);

// Drops inert components, unused restrictions and dead empty queues.
Network net_gc(const Network& n);
// All non-replicated components inert and all queues empty.
bool net_completed(const Network& n);
bool net_is_inert(const Network& n);

// Canonical text of the congruence class: garbage collected, queues in
// commutation normal form, components sorted. Thread names are included only
// when requested.
std::string net_canonical(const Network& n, bool with_threads = false);
bool net_congruent(const Network& a, const Network& b);

std::set<Thread> net_threads(const Network& n);

struct NetTrace {
  std::vector<ELabel> labels;
  Network final;
  Verdict verdict = Verdict::Completed;
};

NetTrace net_run(const Network& n, const AvailabilityOracle& oracle, const Policy& policy, std::size_t max_steps);

// .epq text: one component per `thread` / `replicated` entry, queues and
// restrictions listed explicitly.
std::string print_network(const Network& n);
Network parse_network(std::string_view text);
ProcPtr parse_proc(std::string_view text);

struct EpqSyntaxError : std::runtime_error {
  EpqSyntaxError(std::size_t offset, const std::string& msg) : std::runtime_error(msg), offset(offset) {}
  std::size_t offset;
};

nlohmann::json network_manifest(const Network& n);

}  // namespace gcq
