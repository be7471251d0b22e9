#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcq/choreography.hpp"

namespace gcq {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Intuitionistic linear logic over ownership atoms t:k[A]X.
struct Formula {
  enum class Kind { True, Own, Tensor, Plus, Lolli };
  Kind kind = Kind::True;
  Thread thread;
  SessionKey session;
  Role role;
  CapSet caps;
  FormulaPtr left, right;
  std::string key;  // canonical text, used for equality and ordering
};

namespace ill {
FormulaPtr truth();
FormulaPtr own(Thread t, SessionKey k, Role a, CapSet caps);
// Bare propositional atom, encoded as an ownership atom on a dummy session.
FormulaPtr atom(const std::string& name);
FormulaPtr tensor(FormulaPtr l, FormulaPtr r);
FormulaPtr plus(FormulaPtr l, FormulaPtr r);
FormulaPtr lolli(FormulaPtr l, FormulaPtr r);
// Tensor of a list; truth when empty.
FormulaPtr tensor_all(const std::vector<FormulaPtr>& fs);
}  // namespace ill

using IllContext = std::vector<FormulaPtr>;

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);
std::string print_formula(const FormulaPtr& f);
std::string print_context(const IllContext& ctx);
std::size_t formula_depth(const FormulaPtr& f);
bool lolli_free(const FormulaPtr& f);
// Whether f mentions an ownership atom of thread t in session k.
bool formula_mentions(const FormulaPtr& f, const Thread& t, const SessionKey& k);
void formula_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& out);

struct ProofNode {
  std::string rule;  // ax 1R 1L tensorR tensorL plusR1 plusR2 plusL lolliR lolliL
  IllContext ctx;
  FormulaPtr goal;
  std::vector<std::shared_ptr<const ProofNode>> children;
};
using ProofPtr = std::shared_ptr<const ProofNode>;

struct ProofResult {
  bool provable = false;
  ProofPtr certificate;
};

struct DepthExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProverOptions {
  std::size_t max_depth = 64;
};

// Decides ctx |- goal by backward search: invertible rules eagerly, then
// axiom / right rules / lolli-left with exhaustive context splitting.
ProofResult prove(const IllContext& ctx, const FormulaPtr& goal, const ProverOptions& opts = {});

// Checks that every node of a certificate is a correct rule instance.
bool replay(const ProofNode& p);

}  // namespace gcq
