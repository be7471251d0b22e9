#include "gcq/expr.hpp"

#include <climits>
#include <cmath>

namespace gcq {

namespace ex {
ExprPtr lit(Value v) { return std::make_shared<Expr>(Expr{Expr::Lit{std::move(v)}}); }
ExprPtr var(const std::string& name) { return var(VarName(name)); }
ExprPtr var(VarName name) { return std::make_shared<Expr>(Expr{Expr::Var{std::move(name)}}); }
ExprPtr some(ExprPtr e) { return std::make_shared<Expr>(Expr{Expr::Some{std::move(e)}}); }
ExprPtr none() { return std::make_shared<Expr>(Expr{Expr::None{}}); }
ExprPtr unary(UnOp op, ExprPtr e) { return std::make_shared<Expr>(Expr{Expr::Unary{op, std::move(e)}}); }
ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(Expr{Expr::Binary{op, std::move(l), std::move(r)}});
}
ExprPtr of_opt(const OptValue& v) { return v ? lit(*v) : none(); }
}  // namespace ex

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Expr::Lit>) return x.v == y.v;
        else if constexpr (std::is_same_v<T, Expr::Var>) return x.name == y.name;
        else if constexpr (std::is_same_v<T, Expr::Some>) return expr_equal(x.e, y.e);
        else if constexpr (std::is_same_v<T, Expr::None>) return true;
        else if constexpr (std::is_same_v<T, Expr::Unary>) return x.op == y.op && expr_equal(x.e, y.e);
        else return x.op == y.op && expr_equal(x.l, y.l) && expr_equal(x.r, y.r);
      },
      a->node);
}

static void collect_vars(const ExprPtr& e, std::set<VarName>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Var>) out.insert(x.name);
        else if constexpr (std::is_same_v<T, Expr::Some> || std::is_same_v<T, Expr::Unary>) collect_vars(x.e, out);
        else if constexpr (std::is_same_v<T, Expr::Binary>) {
          collect_vars(x.l, out);
          collect_vars(x.r, out);
        }
      },
      e->node);
}

std::set<VarName> expr_free_vars(const ExprPtr& e) {
  std::set<VarName> out;
  collect_vars(e, out);
  return out;
}

template <typename F>
static ExprPtr map_vars(const ExprPtr& e, const F& f) {
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Var>) return f(e, x.name);
        else if constexpr (std::is_same_v<T, Expr::Some>) {
          auto in = map_vars(x.e, f);
          return in == x.e ? e : ex::some(in);
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          auto in = map_vars(x.e, f);
          return in == x.e ? e : ex::unary(x.op, in);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          auto l = map_vars(x.l, f);
          auto r = map_vars(x.r, f);
          return (l == x.l && r == x.r) ? e : ex::binary(x.op, l, r);
        } else {
          return e;
        }
      },
      e->node);
}

ExprPtr expr_subst(const ExprPtr& e, const std::map<VarName, OptValue>& m) {
  if (m.empty()) return e;
  return map_vars(e, [&](const ExprPtr& self, const VarName& n) -> ExprPtr {
    auto it = m.find(n);
    return it == m.end() ? self : ex::of_opt(it->second);
  });
}

ExprPtr expr_rename_var(const ExprPtr& e, const VarName& from, const VarName& to) {
  return map_vars(e, [&](const ExprPtr& self, const VarName& n) -> ExprPtr {
    return n == from ? ex::var(to) : self;
  });
}

namespace {

OptValue arith(BinOp op, const Value& a, const Value& b) {
  if (op == BinOp::Add && a.sort() == Sort::String && b.sort() == Sort::String)
    return Value(std::get<std::string>(a.repr()) + std::get<std::string>(b.repr()));
  if (!a.is_numeric() || !b.is_numeric()) return std::nullopt;
  if (a.is_int() && b.is_int()) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case BinOp::Add: overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &r); break;
      case BinOp::Sub: overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &r); break;
      default: overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &r); break;
    }
    if (overflow) return std::nullopt;
    return Value(r);
  }
  double x = a.as_number(), y = b.as_number();
  switch (op) {
    case BinOp::Add: return Value(x + y);
    case BinOp::Sub: return Value(x - y);
    default: return Value(x * y);
  }
}

bool comparable(const Value& a, const Value& b) {
  return a.sort() == b.sort() || (a.is_numeric() && b.is_numeric());
}

}  // namespace

OptValue eval(const ExprPtr& e) {
  return std::visit(
      [&](const auto& x) -> OptValue {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Lit>) return x.v;
        else if constexpr (std::is_same_v<T, Expr::Var>) return std::nullopt;
        else if constexpr (std::is_same_v<T, Expr::Some>) return eval(x.e);
        else if constexpr (std::is_same_v<T, Expr::None>) return std::nullopt;
        else if constexpr (std::is_same_v<T, Expr::Unary>) {
          auto v = eval(x.e);
          if (!v) return std::nullopt;
          if (x.op == UnOp::Not) return v->is_bool() ? OptValue(Value(!v->as_bool())) : std::nullopt;
          if (v->is_int()) {
            if (v->as_int() == INT64_MIN) return std::nullopt;
            return Value(-v->as_int());
          }
          if (v->is_float()) return Value(-v->as_float());
          return std::nullopt;
        } else {
          auto l = eval(x.l);
          auto r = eval(x.r);
          if (!l || !r) return std::nullopt;
          switch (x.op) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul: return arith(x.op, *l, *r);
            case BinOp::Eq:
              if (!comparable(*l, *r)) return std::nullopt;
              if (l->is_numeric() && r->is_numeric()) return Value(l->as_number() == r->as_number());
              return Value(*l == *r);
            case BinOp::Lt:
              if (!comparable(*l, *r) || l->is_bool()) return std::nullopt;
              if (l->is_numeric() && r->is_numeric()) return Value(l->as_number() < r->as_number());
              return Value(*l < *r);
            case BinOp::And:
              if (!l->is_bool() || !r->is_bool()) return std::nullopt;
              return Value(l->as_bool() && r->as_bool());
            case BinOp::Or:
              if (!l->is_bool() || !r->is_bool()) return std::nullopt;
              return Value(l->as_bool() || r->as_bool());
          }
          return std::nullopt;
        }
      },
      e->node);
}

bool eval_guard(const ExprPtr& e) {
  auto v = eval(e);
  return v && v->is_bool() && v->as_bool();
}

namespace {

int prec_of(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Lt: return 3;
    case BinOp::Add:
    case BinOp::Sub: return 4;
    case BinOp::Mul: return 5;
  }
  return 0;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
    case BinOp::Eq: return "=";
    case BinOp::Lt: return "<";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
  }
  return "?";
}

int prec_of(const ExprPtr& e) {
  if (auto* b = std::get_if<Expr::Binary>(&e->node)) return prec_of(b->op);
  if (std::holds_alternative<Expr::Unary>(e->node)) return 6;
  if (auto* l = std::get_if<Expr::Lit>(&e->node)) {
    // a negative literal reads back as a unary minus on an atom
    if ((l->v.is_int() && l->v.as_int() < 0) || (l->v.is_float() && std::signbit(l->v.as_float()))) return 6;
  }
  return 7;
}

void print_into(const ExprPtr& e, int min_prec, std::string& out);

void print_paren(const ExprPtr& e, int min_prec, std::string& out) {
  bool wrap = prec_of(e) < min_prec;
  if (wrap) out += "(";
  print_into(e, wrap ? 0 : min_prec, out);
  if (wrap) out += ")";
}

void print_into(const ExprPtr& e, int, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Lit>) out += x.v.to_string();
        else if constexpr (std::is_same_v<T, Expr::Var>) out += x.name.str();
        else if constexpr (std::is_same_v<T, Expr::Some>) {
          out += "some(";
          print_into(x.e, 0, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, Expr::None>) out += "none";
        else if constexpr (std::is_same_v<T, Expr::Unary>) {
          out += x.op == UnOp::Neg ? "-" : "!";
          // keep "-(2)" apart from the literal -2
          bool wrap = prec_of(x.e) < 7 || std::holds_alternative<Expr::Lit>(x.e->node);
          if (wrap) out += "(";
          print_into(x.e, 0, out);
          if (wrap) out += ")";
        } else {
          int p = prec_of(x.op);
          bool nonassoc = x.op == BinOp::Eq || x.op == BinOp::Lt;
          print_paren(x.l, nonassoc ? p + 1 : p, out);
          out += " ";
          out += op_text(x.op);
          out += " ";
          print_paren(x.r, p + 1, out);
        }
      },
      e->node);
}

}  // namespace

std::string print_expr(const ExprPtr& e) {
  std::string out;
  print_into(e, 0, out);
  return out;
}

SortResult infer_sort(const ExprPtr& e, const std::function<std::optional<Sort>(const VarName&)>& var_sort) {
  auto fail = [](std::string why) { return SortResult{false, std::nullopt, std::move(why)}; };
  return std::visit(
      [&](const auto& x) -> SortResult {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Lit>) return {true, x.v.sort(), {}};
        else if constexpr (std::is_same_v<T, Expr::Var>) {
          auto s = var_sort(x.name);
          if (!s) return fail("unbound variable " + x.name.str());
          return {true, s, {}};
        } else if constexpr (std::is_same_v<T, Expr::Some>) return infer_sort(x.e, var_sort);
        else if constexpr (std::is_same_v<T, Expr::None>) return {true, std::nullopt, {}};
        else if constexpr (std::is_same_v<T, Expr::Unary>) {
          auto r = infer_sort(x.e, var_sort);
          if (!r.ok) return r;
          if (x.op == UnOp::Not) {
            if (r.sort && *r.sort != Sort::Bool) return fail("negation of non-bool");
            return {true, Sort::Bool, {}};
          }
          if (r.sort && *r.sort != Sort::Int && *r.sort != Sort::Float) return fail("minus on non-number");
          return r;
        } else {
          auto l = infer_sort(x.l, var_sort);
          if (!l.ok) return l;
          auto r = infer_sort(x.r, var_sort);
          if (!r.ok) return r;
          if (l.sort && r.sort && *l.sort != *r.sort)
            return fail(std::string("operands of ") + op_text(x.op) + " have sorts " + sort_name(*l.sort) + " and " +
                        sort_name(*r.sort));
          auto s = l.sort ? l.sort : r.sort;
          switch (x.op) {
            case BinOp::Add:
              if (s && *s != Sort::Int && *s != Sort::Float && *s != Sort::String) return fail("+ on non-number");
              return {true, s, {}};
            case BinOp::Sub:
            case BinOp::Mul:
              if (s && *s != Sort::Int && *s != Sort::Float) return fail("arithmetic on non-number");
              return {true, s, {}};
            case BinOp::Eq: return {true, Sort::Bool, {}};
            case BinOp::Lt:
              if (s && *s == Sort::Bool) return fail("< on bool");
              return {true, Sort::Bool, {}};
            case BinOp::And:
            case BinOp::Or:
              if (s && *s != Sort::Bool) return fail("logic on non-bool");
              return {true, Sort::Bool, {}};
          }
          return fail("unknown operator");
        }
      },
      e->node);
}

bool check_sort(const ExprPtr& e, Sort expected, const std::function<std::optional<Sort>(const VarName&)>& var_sort,
                std::string* why) {
  auto r = infer_sort(e, var_sort);
  if (!r.ok) {
    if (why) *why = r.error;
    return false;
  }
  if (r.sort && *r.sort != expected) {
    if (why) *why = std::string("expected ") + sort_name(expected) + ", found " + sort_name(*r.sort);
    return false;
  }
  return true;
}

}  // namespace gcq
