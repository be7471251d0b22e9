#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gcq/expr.hpp"
#include "gcq/names.hpp"
#include "gcq/quality.hpp"

namespace gcq {

using CapSet = std::set<CapAtom>;

struct AnnotatedThread {
  Thread thread;
  Role role;
  CapSet req;
  CapSet off;
  bool operator==(const AnnotatedThread&) const = default;
};

struct Init {
  std::vector<AnnotatedThread> actives;
  std::vector<AnnotatedThread> services;
  ServiceName service;
  SessionKey key;
};

struct Receiver {
  AnnotatedThread at;
  VarName var;
};

struct Sender {
  AnnotatedThread at;
  ExprPtr expr;
};

struct Bcast {
  SessionKey key;
  Quality q;
  AnnotatedThread sender;
  ExprPtr expr;
  std::vector<Receiver> receivers;
};

struct Reduce {
  SessionKey key;
  Quality q;
  AggOp op;
  std::vector<Sender> senders;
  AnnotatedThread receiver;
  VarName var;
};

struct Select {
  SessionKey key;
  Quality q;
  AnnotatedThread sender;
  std::vector<AnnotatedThread> receivers;
  Label label;
};

using Interaction = std::variant<Init, Bcast, Reduce, Select>;

struct Chor;
using ChorPtr = std::shared_ptr<const Chor>;

struct Chor {
  struct End {};
  struct Seq {
    Interaction act;
    ChorPtr next;
  };
  struct If {
    ExprPtr guard;
    Thread at;
    ChorPtr then_branch;
    ChorPtr else_branch;
  };
  // Runtime restriction of a thread or session name.
  struct New {
    std::string name;
    ChorPtr body;
  };

  std::variant<End, Seq, If, New> node;

  bool is_end() const { return std::holds_alternative<End>(node); }
};

namespace ch {
ChorPtr end();
ChorPtr seq(Interaction act, ChorPtr next);
ChorPtr if_(ExprPtr guard, Thread at, ChorPtr then_branch, ChorPtr else_branch);
ChorPtr new_(std::string name, ChorPtr body);
}  // namespace ch

AnnotatedThread athr(const std::string& thread, const std::string& role, std::set<std::string> req = {},
                     std::set<std::string> off = {});

// Structural equality (names compared literally).
bool interaction_equal(const Interaction& a, const Interaction& b);
bool chor_equal(const ChorPtr& a, const ChorPtr& b);

std::string interaction_kind(const Interaction& a);
SessionKey interaction_session(const Interaction& a);
// Participants in canonical order: init actives then services; bcast/select
// sender then receivers; reduce senders then receiver.
std::vector<AnnotatedThread> participants(const Interaction& a);
std::set<Thread> interaction_threads(const Interaction& a);
std::set<Thread> chor_threads(const ChorPtr& c);
std::size_t chor_size(const ChorPtr& c);  // number of interactions + ifs

using VarAt = std::pair<VarName, Thread>;
using Subst = std::map<VarAt, OptValue>;

struct FreeNames {
  std::set<Thread> threads;
  std::set<SessionKey> sessions;
  std::set<ServiceName> services;
  std::set<VarAt> vars;
  std::set<Role> roles;
  bool operator==(const FreeNames&) const = default;
};

FreeNames free_names(const ChorPtr& c);
// Every name spelled anywhere in the term, bound or free.
std::set<std::string> all_names(const ChorPtr& c);

ChorPtr substitute(const ChorPtr& c, const Subst& theta);
Interaction substitute_interaction(const Interaction& a, const Subst& theta);

// Capture-avoiding renaming of a free thread / session name.
ChorPtr rename_thread(const ChorPtr& c, const Thread& from, const Thread& to);
ChorPtr rename_session(const ChorPtr& c, const SessionKey& from, const SessionKey& to);
ChorPtr rename_var(const ChorPtr& c, const VarAt& from, const VarName& to);

// Gives every binder (init service threads and keys, receiver variables) a
// name unique in the whole term and outside `avoid`. Free names are untouched.
ChorPtr rename_apart(const ChorPtr& c, const std::set<std::string>& avoid = {});

// Smallest name of the form base, base_1, base_2, ... outside `used`.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

}  // namespace gcq
