#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gcq/names.hpp"
#include "gcq/value.hpp"

namespace gcq {

struct GType;
using GTypePtr = std::shared_ptr<const GType>;

struct GType {
  struct BcastT {
    Role from;
    std::vector<Role> to;
    Sort sort;
    GTypePtr next;
  };
  struct RedT {
    std::vector<Role> from;
    Role to;
    Sort sort;
    GTypePtr next;
  };
  struct BranchT {
    Role from;
    std::vector<Role> to;
    std::map<Label, GTypePtr> branches;
  };
  struct EndT {};

  std::variant<BcastT, RedT, BranchT, EndT> node;

  bool is_end() const { return std::holds_alternative<EndT>(node); }
};

namespace gt {
GTypePtr end();
GTypePtr bcast(Role from, std::vector<Role> to, Sort s, GTypePtr next);
GTypePtr red(std::vector<Role> from, Role to, Sort s, GTypePtr next);
GTypePtr branch(Role from, std::vector<Role> to, std::map<Label, GTypePtr> branches);
}  // namespace gt

// k:alpha without the session. `one` is the bcast/select sender or the reduce
// receiver; `many` the other side. Role lists compare as sets.
struct TypeLabel {
  enum class Kind { Bcast, Red, Sel };
  Kind kind = Kind::Bcast;
  Role one;
  std::vector<Role> many;
  std::optional<Sort> sort;    // bcast / red
  std::optional<Label> label;  // sel
};

bool type_label_matches(const TypeLabel& head, const TypeLabel& alpha);
std::string print_type_label(const TypeLabel& a);

bool gtype_equal(const GTypePtr& a, const GTypePtr& b);
std::string print_gtype(const GTypePtr& g);
std::set<Role> gtype_roles(const GTypePtr& g);

// Every label firable from g, possibly after type swaps, with its residual.
std::vector<std::pair<TypeLabel, GTypePtr>> gtype_heads(const GTypePtr& g);

struct NoMatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GTypePtr gtype_step(const GTypePtr& g, const TypeLabel& alpha);
std::optional<GTypePtr> gtype_try_step(const GTypePtr& g, const TypeLabel& alpha);

// Equivalence under the type swap relation (bounded closure).
bool gtype_swap_equal(const GTypePtr& a, const GTypePtr& b);

// Checks constructor well-formedness; empty string when fine.
std::string gtype_problem(const GTypePtr& g);

}  // namespace gcq
