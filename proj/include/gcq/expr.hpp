#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>

#include "gcq/names.hpp"
#include "gcq/value.hpp"

namespace gcq {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Eq, Lt, And, Or };

struct Expr {
  struct Lit { Value v; };
  struct Var { VarName name; };
  struct Some { ExprPtr e; };
  struct None {};
  struct Unary { UnOp op; ExprPtr e; };
  struct Binary { BinOp op; ExprPtr l, r; };

  std::variant<Lit, Var, Some, None, Unary, Binary> node;
};

namespace ex {
ExprPtr lit(Value v);
ExprPtr var(const std::string& name);
ExprPtr var(VarName name);
ExprPtr some(ExprPtr e);
ExprPtr none();
ExprPtr unary(UnOp op, ExprPtr e);
ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r);
ExprPtr of_opt(const OptValue& v);
}  // namespace ex

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
std::set<VarName> expr_free_vars(const ExprPtr& e);

// Replaces variables by values; unmapped variables stay.
ExprPtr expr_subst(const ExprPtr& e, const std::map<VarName, OptValue>& m);
ExprPtr expr_rename_var(const ExprPtr& e, const VarName& from, const VarName& to);

// Total evaluation: free variables and ill-sorted operations give none.
OptValue eval(const ExprPtr& e);
bool eval_guard(const ExprPtr& e);

std::string print_expr(const ExprPtr& e);

// Sort inference. `var_sort` resolves variables; nullopt result with ok=true
// means the expression is sort-polymorphic (a bare none).
struct SortResult {
  bool ok = true;
  std::optional<Sort> sort;
  std::string error;
};
SortResult infer_sort(const ExprPtr& e, const std::function<std::optional<Sort>(const VarName&)>& var_sort);
bool check_sort(const ExprPtr& e, Sort expected,
                const std::function<std::optional<Sort>(const VarName&)>& var_sort, std::string* why = nullptr);

}  // namespace gcq
