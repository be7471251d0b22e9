#include "gcq/ill.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "gcq/state.hpp"

namespace gcq {

namespace ill {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FormulaPtr binary(Formula::Kind k, const char* op, FormulaPtr l, FormulaPtr r) {
  Formula f;
  f.kind = k;
  f.key = "(" + l->key + " " + op + " " + r->key + ")";
  f.left = std::move(l);
  f.right = std::move(r);
  return make(std::move(f));
}

}  // namespace

FormulaPtr truth() {
  static const FormulaPtr t = [] {
    Formula f;
    f.kind = Formula::Kind::True;
    f.key = "true";
    return make(std::move(f));
  }();
  return t;
}

FormulaPtr own(Thread t, SessionKey k, Role a, CapSet caps) {
  Formula f;
  f.kind = Formula::Kind::Own;
  f.key = t.str() + ":" + k.str() + "[" + a.str() + "]" + print_caps(caps);
  f.thread = std::move(t);
  f.session = std::move(k);
  f.role = std::move(a);
  f.caps = std::move(caps);
  return make(std::move(f));
}

FormulaPtr atom(const std::string& name) {
  Formula f;
  f.kind = Formula::Kind::Own;
  f.key = name;
  f.thread = Thread(name);
  f.session = SessionKey("_");
  f.role = Role("_");
  return make(std::move(f));
}

FormulaPtr tensor(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::Tensor, "*", std::move(l), std::move(r)); }
FormulaPtr plus(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::Plus, "+", std::move(l), std::move(r)); }
FormulaPtr lolli(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::Lolli, "-o", std::move(l), std::move(r)); }

FormulaPtr tensor_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return truth();
  FormulaPtr acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = tensor(fs[i], acc);
  return acc;
}

}  // namespace ill

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) { return a->key == b->key; }

std::string print_formula(const FormulaPtr& f) { return f->key; }

std::string print_context(const IllContext& ctx) {
  std::string out;
  for (std::size_t i = 0; i < ctx.size(); ++i) out += (i ? ", " : "") + ctx[i]->key;
  return out.empty() ? "." : out;
}

std::size_t formula_depth(const FormulaPtr& f) {
  if (!f->left) return 0;
  return 1 + std::max(formula_depth(f->left), formula_depth(f->right));
}

bool lolli_free(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::Lolli) return false;
  if (!f->left) return true;
  return lolli_free(f->left) && lolli_free(f->right);
}

bool formula_mentions(const FormulaPtr& f, const Thread& t, const SessionKey& k) {
  if (f->kind == Formula::Kind::Own) return f->thread == t && f->session == k;
  if (!f->left) return false;
  return formula_mentions(f->left, t, k) || formula_mentions(f->right, t, k);
}

void formula_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == Formula::Kind::Own) out.push_back(f);
  if (!f->left) return;
  formula_atoms(f->left, out);
  formula_atoms(f->right, out);
}

namespace {

using Kind = Formula::Kind;

IllContext sorted(IllContext c) {
  std::sort(c.begin(), c.end(), [](const FormulaPtr& a, const FormulaPtr& b) { return a->key < b->key; });
  return c;
}

IllContext without(const IllContext& c, std::size_t i) {
  IllContext out;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j != i) out.push_back(c[j]);
  return out;
}

IllContext with(IllContext c, std::initializer_list<FormulaPtr> fs) {
  for (const auto& f : fs) c.push_back(f);
  return sorted(std::move(c));
}

std::string seq_key(const IllContext& c, const FormulaPtr& g) {
  std::string k;
  for (const auto& f : c) k += f->key + ",";
  return k + "|-" + g->key;
}

// Distinct two-way splits of a sorted multiset.
std::vector<std::pair<IllContext, IllContext>> splits(const IllContext& c) {
  std::vector<std::pair<IllContext, IllContext>> out;
  std::set<std::string> seen;
  std::size_t n = c.size();
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    IllContext a, b;
    std::string key;
    for (std::size_t i = 0; i < n; ++i) {
      if ((m >> i) & 1u) {
        a.push_back(c[i]);
        key += c[i]->key + ",";
      } else {
        b.push_back(c[i]);
      }
    }
    if (seen.insert(key).second) out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

class Prover {
 public:
  explicit Prover(const ProverOptions& o) : opts_(o) {}

  ProofPtr prove(const IllContext& ctx, const FormulaPtr& goal, std::size_t depth) {
    if (depth > opts_.max_depth) throw DepthExceeded("proof search exceeded depth " + std::to_string(opts_.max_depth));
    auto key = seq_key(ctx, goal);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto p = search(ctx, goal, depth);
    memo_[key] = p;
    return p;
  }

 private:
  ProofPtr node(std::string rule, const IllContext& ctx, const FormulaPtr& goal, std::vector<ProofPtr> kids) {
    auto n = std::make_shared<ProofNode>();
    n->rule = std::move(rule);
    n->ctx = ctx;
    n->goal = goal;
    n->children = std::move(kids);
    return n;
  }

  ProofPtr search(const IllContext& ctx, const FormulaPtr& goal, std::size_t depth) {
    // Invertible rules first.
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const auto& f = ctx[i];
      if (f->kind == Kind::True) {
        auto p = prove(without(ctx, i), goal, depth + 1);
        return p ? node("1L", ctx, goal, {p}) : nullptr;
      }
      if (f->kind == Kind::Tensor) {
        auto p = prove(with(without(ctx, i), {f->left, f->right}), goal, depth + 1);
        return p ? node("tensorL", ctx, goal, {p}) : nullptr;
      }
      if (f->kind == Kind::Plus) {
        auto rest = without(ctx, i);
        auto a = prove(with(rest, {f->left}), goal, depth + 1);
        if (!a) return nullptr;
        auto b = prove(with(rest, {f->right}), goal, depth + 1);
        return b ? node("plusL", ctx, goal, {a, b}) : nullptr;
      }
    }
    if (goal->kind == Kind::Lolli) {
      auto p = prove(with(ctx, {goal->left}), goal->right, depth + 1);
      return p ? node("lolliR", ctx, goal, {p}) : nullptr;
    }
    // Context now holds atoms and implications only.
    switch (goal->kind) {
      case Kind::True:
        if (ctx.empty()) return node("1R", ctx, goal, {});
        break;
      case Kind::Own:
        if (ctx.size() == 1 && ctx[0]->key == goal->key) return node("ax", ctx, goal, {});
        break;
      case Kind::Tensor:
        for (const auto& [a, b] : splits(ctx)) {
          auto l = prove(a, goal->left, depth + 1);
          if (!l) continue;
          auto r = prove(b, goal->right, depth + 1);
          if (r) return node("tensorR", ctx, goal, {l, r});
        }
        break;
      case Kind::Plus:
        if (auto l = prove(ctx, goal->left, depth + 1)) return node("plusR1", ctx, goal, {l});
        if (auto r = prove(ctx, goal->right, depth + 1)) return node("plusR2", ctx, goal, {r});
        break;
      default: break;
    }
    std::set<std::string> tried;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const auto& f = ctx[i];
      if (f->kind != Kind::Lolli || !tried.insert(f->key).second) continue;
      for (const auto& [a, b] : splits(without(ctx, i))) {
        auto l = prove(a, f->left, depth + 1);
        if (!l) continue;
        auto r = prove(with(b, {f->right}), goal, depth + 1);
        if (r) return node("lolliL", ctx, goal, {l, r});
      }
    }
    return nullptr;
  }

  ProverOptions opts_;
  std::map<std::string, ProofPtr> memo_;
};

bool same_multiset(IllContext a, IllContext b) {
  a = sorted(std::move(a));
  b = sorted(std::move(b));
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]->key != b[i]->key) return false;
  return true;
}

IllContext concat(const IllContext& a, const IllContext& b) {
  IllContext out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Index of a formula of the given kind whose removal leaves `rest`.
bool has_principal(const IllContext& ctx, Kind k, const std::function<bool(const FormulaPtr&, const IllContext&)>& ok) {
  for (std::size_t i = 0; i < ctx.size(); ++i)
    if (ctx[i]->kind == k && ok(ctx[i], without(ctx, i))) return true;
  return false;
}

}  // namespace

ProofResult prove(const IllContext& ctx, const FormulaPtr& goal, const ProverOptions& opts) {
  Prover p(opts);
  auto proof = p.prove(sorted(ctx), goal, 0);
  return {proof != nullptr, proof};
}

bool replay(const ProofNode& p) {
  for (const auto& c : p.children)
    if (!c || !replay(*c)) return false;
  const auto& k = p.children;
  const auto& g = p.goal;
  auto sub = [&](std::size_t i) -> const ProofNode& { return *k[i]; };
  if (p.rule == "ax") return k.empty() && p.ctx.size() == 1 && g->kind == Kind::Own && p.ctx[0]->key == g->key;
  if (p.rule == "1R") return k.empty() && p.ctx.empty() && g->kind == Kind::True;
  if (p.rule == "1L")
    return k.size() == 1 && sub(0).goal->key == g->key &&
           has_principal(p.ctx, Kind::True, [&](const FormulaPtr&, const IllContext& rest) {
             return same_multiset(rest, sub(0).ctx);
           });
  if (p.rule == "tensorL")
    return k.size() == 1 && sub(0).goal->key == g->key &&
           has_principal(p.ctx, Kind::Tensor, [&](const FormulaPtr& f, const IllContext& rest) {
             return same_multiset(concat(rest, {f->left, f->right}), sub(0).ctx);
           });
  if (p.rule == "plusL")
    return k.size() == 2 && sub(0).goal->key == g->key && sub(1).goal->key == g->key &&
           has_principal(p.ctx, Kind::Plus, [&](const FormulaPtr& f, const IllContext& rest) {
             return same_multiset(concat(rest, {f->left}), sub(0).ctx) &&
                    same_multiset(concat(rest, {f->right}), sub(1).ctx);
           });
  if (p.rule == "lolliR")
    return k.size() == 1 && g->kind == Kind::Lolli && sub(0).goal->key == g->right->key &&
           same_multiset(concat(p.ctx, {g->left}), sub(0).ctx);
  if (p.rule == "tensorR")
    return k.size() == 2 && g->kind == Kind::Tensor && sub(0).goal->key == g->left->key &&
           sub(1).goal->key == g->right->key && same_multiset(concat(sub(0).ctx, sub(1).ctx), p.ctx);
  if (p.rule == "plusR1")
    return k.size() == 1 && g->kind == Kind::Plus && sub(0).goal->key == g->left->key &&
           same_multiset(sub(0).ctx, p.ctx);
  if (p.rule == "plusR2")
    return k.size() == 1 && g->kind == Kind::Plus && sub(0).goal->key == g->right->key &&
           same_multiset(sub(0).ctx, p.ctx);
  if (p.rule == "lolliL")
    return k.size() == 2 && sub(1).goal->key == g->key &&
           has_principal(p.ctx, Kind::Lolli, [&](const FormulaPtr& f, const IllContext& rest) {
             if (sub(0).goal->key != f->left->key) return false;
             // sub(1).ctx = Gamma2, B ; rest = Gamma1, Gamma2
             for (std::size_t i = 0; i < sub(1).ctx.size(); ++i) {
               if (sub(1).ctx[i]->key != f->right->key) continue;
               if (same_multiset(concat(sub(0).ctx, without(sub(1).ctx, i)), rest)) return true;
             }
             return false;
           });
  return false;
}

}  // namespace gcq
