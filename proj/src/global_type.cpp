#include "gcq/global_type.hpp"

#include <algorithm>

namespace gcq {

namespace gt {
GTypePtr end() {
  static const GTypePtr e = std::make_shared<GType>(GType{GType::EndT{}});
  return e;
}
GTypePtr bcast(Role from, std::vector<Role> to, Sort s, GTypePtr next) {
  return std::make_shared<GType>(GType{GType::BcastT{std::move(from), std::move(to), s, std::move(next)}});
}
GTypePtr red(std::vector<Role> from, Role to, Sort s, GTypePtr next) {
  return std::make_shared<GType>(GType{GType::RedT{std::move(from), std::move(to), s, std::move(next)}});
}
GTypePtr branch(Role from, std::vector<Role> to, std::map<Label, GTypePtr> branches) {
  return std::make_shared<GType>(GType{GType::BranchT{std::move(from), std::move(to), std::move(branches)}});
}
}  // namespace gt

namespace {

std::set<Role> as_set(const std::vector<Role>& v) { return {v.begin(), v.end()}; }

std::set<Role> label_roles(const TypeLabel& a) {
  auto s = as_set(a.many);
  s.insert(a.one);
  return s;
}

bool disjoint(const std::set<Role>& a, const std::set<Role>& b) {
  for (const auto& r : a)
    if (b.count(r)) return false;
  return true;
}

bool same_label(const TypeLabel& a, const TypeLabel& b) {
  return a.kind == b.kind && a.one == b.one && as_set(a.many) == as_set(b.many) && a.sort == b.sort &&
         a.label == b.label;
}

std::string roles_text(const std::vector<Role>& rs) {
  std::string out = "(";
  for (std::size_t i = 0; i < rs.size(); ++i) out += (i ? "," : "") + rs[i].str();
  return out + ")";
}

}  // namespace

bool type_label_matches(const TypeLabel& head, const TypeLabel& alpha) {
  if (head.kind != alpha.kind || !(head.one == alpha.one) || as_set(head.many) != as_set(alpha.many)) return false;
  if (alpha.sort && head.sort != alpha.sort) return false;
  if (alpha.label && head.label != alpha.label) return false;
  return true;
}

std::string print_type_label(const TypeLabel& a) {
  switch (a.kind) {
    case TypeLabel::Kind::Bcast:
      return "bcast " + a.one.str() + " -> " + roles_text(a.many) + (a.sort ? std::string(" : ") + sort_name(*a.sort) : "");
    case TypeLabel::Kind::Red:
      return "reduce " + roles_text(a.many) + " -> " + a.one.str() +
             (a.sort ? std::string(" : ") + sort_name(*a.sort) : "");
    case TypeLabel::Kind::Sel:
      return "branch " + a.one.str() + " -> " + roles_text(a.many) + (a.label ? " : " + a.label->str() : "");
  }
  return "?";
}

bool gtype_equal(const GTypePtr& a, const GTypePtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, GType::EndT>) return true;
        else if constexpr (std::is_same_v<T, GType::BranchT>) {
          if (!(x.from == y.from && x.to == y.to && x.branches.size() == y.branches.size())) return false;
          for (const auto& [l, g] : x.branches) {
            auto it = y.branches.find(l);
            if (it == y.branches.end() || !gtype_equal(g, it->second)) return false;
          }
          return true;
        } else {
          return x.from == y.from && x.to == y.to && x.sort == y.sort && gtype_equal(x.next, y.next);
        }
      },
      a->node);
}

std::string print_gtype(const GTypePtr& g) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GType::EndT>) return "end";
        else if constexpr (std::is_same_v<T, GType::BcastT>)
          return "bcast " + x.from.str() + " -> " + roles_text(x.to) + " : " + sort_name(x.sort) + " . " +
                 print_gtype(x.next);
        else if constexpr (std::is_same_v<T, GType::RedT>)
          return "reduce " + roles_text(x.from) + " -> " + x.to.str() + " : " + sort_name(x.sort) + " . " +
                 print_gtype(x.next);
        else {
          std::string out = "branch " + x.from.str() + " -> " + roles_text(x.to) + " { ";
          bool first = true;
          for (const auto& [l, b] : x.branches) {
            if (!first) out += ", ";
            out += l.str() + " : " + print_gtype(b);
            first = false;
          }
          return out + " }";
        }
      },
      g->node);
}

std::set<Role> gtype_roles(const GTypePtr& g) {
  std::set<Role> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GType::BcastT>) {
          out = gtype_roles(x.next);
          out.insert(x.from);
          out.insert(x.to.begin(), x.to.end());
        } else if constexpr (std::is_same_v<T, GType::RedT>) {
          out = gtype_roles(x.next);
          out.insert(x.to);
          out.insert(x.from.begin(), x.from.end());
        } else if constexpr (std::is_same_v<T, GType::BranchT>) {
          for (const auto& [l, b] : x.branches) {
            auto r = gtype_roles(b);
            out.insert(r.begin(), r.end());
          }
          out.insert(x.from);
          out.insert(x.to.begin(), x.to.end());
        }
      },
      g->node);
  return out;
}

std::vector<std::pair<TypeLabel, GTypePtr>> gtype_heads(const GTypePtr& g) {
  std::vector<std::pair<TypeLabel, GTypePtr>> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GType::BcastT> || std::is_same_v<T, GType::RedT>) {
          TypeLabel me;
          if constexpr (std::is_same_v<T, GType::BcastT>) {
            me = TypeLabel{TypeLabel::Kind::Bcast, x.from, x.to, x.sort, std::nullopt};
          } else {
            me = TypeLabel{TypeLabel::Kind::Red, x.to, x.from, x.sort, std::nullopt};
          }
          out.emplace_back(me, x.next);
          auto mine = label_roles(me);
          for (const auto& [a, rest] : gtype_heads(x.next)) {
            if (!disjoint(mine, label_roles(a))) continue;
            GTypePtr swapped;
            if constexpr (std::is_same_v<T, GType::BcastT>) swapped = gt::bcast(x.from, x.to, x.sort, rest);
            else swapped = gt::red(x.from, x.to, x.sort, rest);
            out.emplace_back(a, swapped);
          }
        } else if constexpr (std::is_same_v<T, GType::BranchT>) {
          std::set<Role> mine = as_set(x.to);
          mine.insert(x.from);
          for (const auto& [l, b] : x.branches)
            out.emplace_back(TypeLabel{TypeLabel::Kind::Sel, x.from, x.to, std::nullopt, l}, b);
          // a label available in every branch and independent of the choice
          if (x.branches.empty()) return;
          auto first = gtype_heads(x.branches.begin()->second);
          for (const auto& [a, rest0] : first) {
            if (!disjoint(mine, label_roles(a))) continue;
            std::map<Label, GTypePtr> residual;
            bool everywhere = true;
            for (const auto& [l, b] : x.branches) {
              bool found = false;
              for (const auto& [a2, rest2] : gtype_heads(b)) {
                if (same_label(a, a2)) {
                  residual[l] = rest2;
                  found = true;
                  break;
                }
              }
              if (!found) {
                everywhere = false;
                break;
              }
            }
            if (everywhere) out.emplace_back(a, gt::branch(x.from, x.to, residual));
          }
        }
      },
      g->node);
  return out;
}

std::optional<GTypePtr> gtype_try_step(const GTypePtr& g, const TypeLabel& alpha) {
  for (const auto& [head, rest] : gtype_heads(g))
    if (type_label_matches(head, alpha)) return rest;
  return std::nullopt;
}

GTypePtr gtype_step(const GTypePtr& g, const TypeLabel& alpha) {
  auto r = gtype_try_step(g, alpha);
  if (!r) throw NoMatch("no transition " + print_type_label(alpha) + " from " + print_gtype(g));
  return *r;
}

namespace {

bool swap_eq(const GTypePtr& a, const GTypePtr& b, std::map<std::pair<std::string, std::string>, bool>& memo) {
  if (gtype_equal(a, b)) return true;
  auto key = std::make_pair(print_gtype(a), print_gtype(b));
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  memo[key] = false;
  auto ha = gtype_heads(a);
  auto hb = gtype_heads(b);
  auto covers = [&](const auto& xs, const auto& ys, bool flip) {
    for (const auto& [la, ra] : xs) {
      bool ok = false;
      for (const auto& [lb, rb] : ys) {
        if (!same_label(la, lb)) continue;
        if (flip ? swap_eq(rb, ra, memo) : swap_eq(ra, rb, memo)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  bool r = a->is_end() == b->is_end() && covers(ha, hb, false) && covers(hb, ha, true);
  memo[key] = r;
  return r;
}

}  // namespace

bool gtype_swap_equal(const GTypePtr& a, const GTypePtr& b) {
  std::map<std::pair<std::string, std::string>, bool> memo;
  return swap_eq(a, b, memo);
}

std::string gtype_problem(const GTypePtr& g) {
  auto distinct = [](std::vector<Role> rs, const Role& extra) {
    rs.push_back(extra);
    std::sort(rs.begin(), rs.end());
    return std::adjacent_find(rs.begin(), rs.end()) == rs.end();
  };
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GType::EndT>) return {};
        else if constexpr (std::is_same_v<T, GType::BcastT>) {
          if (!distinct(x.to, x.from)) return "repeated role in " + print_gtype(g);
          return gtype_problem(x.next);
        } else if constexpr (std::is_same_v<T, GType::RedT>) {
          if (!distinct(x.from, x.to)) return "repeated role in " + print_gtype(g);
          return gtype_problem(x.next);
        } else {
          if (!distinct(x.to, x.from)) return "repeated role in " + print_gtype(g);
          if (x.branches.empty()) return "branch without labels";
          for (const auto& [l, b] : x.branches)
            if (auto p = gtype_problem(b); !p.empty()) return p;
          return {};
        }
      },
      g->node);
}

}  // namespace gcq
