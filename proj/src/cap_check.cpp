#include "gcq/cap_check.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "gcq/parser.hpp"

namespace gcq {

nlohmann::json cap_report_json(const CapReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures) {
    nlohmann::json e;
    e["code"] = f.code;
    e["interaction"] = f.interaction;
    auto subset = nlohmann::json::array();
    for (const auto& t : f.subset) subset.push_back(t.str());
    e["subset"] = subset;
    e["missing"] = f.missing;
    e["sequent"] = f.sequent;
    e["message"] = f.message;
    j["failures"].push_back(e);
  }
  return j;
}

IllContext init_ownerships(const Init& init) {
  IllContext out;
  for (const auto& p : participants(init)) out.push_back(ill::own(p.thread, init.key, p.role, p.off));
  return out;
}

namespace {

IllContext sorted(IllContext c) {
  std::sort(c.begin(), c.end(), [](const FormulaPtr& a, const FormulaPtr& b) { return a->key < b->key; });
  return c;
}

std::string ctx_key(const IllContext& c) {
  std::string k;
  for (const auto& f : c) k += f->key + ",";
  return k;
}

struct Collective {
  SessionKey key;
  Quality q;
  AnnotatedThread leader;
  std::vector<AnnotatedThread> others;
};

Collective collective(const Interaction& a) {
  if (auto* b = std::get_if<Bcast>(&a)) {
    Collective c{b->key, b->q, b->sender, {}};
    for (const auto& r : b->receivers) c.others.push_back(r.at);
    return c;
  }
  if (auto* r = std::get_if<Reduce>(&a)) {
    Collective c{r->key, r->q, r->receiver, {}};
    for (const auto& s : r->senders) c.others.push_back(s.at);
    return c;
  }
  const auto& s = std::get<Select>(a);
  return {s.key, s.q, s.sender, s.receivers};
}

class Checker {
 public:
  std::optional<CapFailure> check(const ChorPtr& c, const IllContext& ctx) {
    auto key = std::to_string(reinterpret_cast<std::uintptr_t>(c.get())) + "|" + ctx_key(ctx);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto r = visit(c, ctx);
    memo_[key] = r;
    return r;
  }

 private:
  std::optional<CapFailure> visit(const ChorPtr& c, const IllContext& ctx) {
    if (c->is_end()) return std::nullopt;
    if (auto* n = std::get_if<Chor::New>(&c->node)) return check(n->body, ctx);
    if (auto* i = std::get_if<Chor::If>(&c->node)) {
      if (auto r = check(i->then_branch, ctx)) return r;
      return check(i->else_branch, ctx);
    }
    const auto& s = std::get<Chor::Seq>(c->node);
    if (auto* init = std::get_if<Init>(&s.act)) return visit_init(*init, s.next, ctx);
    return visit_collective(s.act, s.next, ctx);
  }

  std::optional<CapFailure> visit_init(const Init& init, const ChorPtr& next, const IllContext& ctx) {
    std::vector<FormulaPtr> atoms;
    for (const auto& f : ctx) formula_atoms(f, atoms);
    for (const auto& a : atoms) {
      bool clash = a->session == init.key;
      for (const auto& s : init.services) clash = clash || a->thread == s.thread;
      if (clash) {
        CapFailure f;
        f.code = "FreshnessViolation";
        f.interaction = print_interaction(init);
        f.message = "session key or service thread already occurs in the context: " + a->key;
        return f;
      }
    }
    auto ext = ctx;
    for (const auto& f : init_ownerships(init)) ext.push_back(f);
    return check(next, sorted(std::move(ext)));
  }

  bool provable(const IllContext& s, const FormulaPtr& goal) {
    auto key = ctx_key(s) + "|-" + goal->key;
    if (auto it = proofs_.find(key); it != proofs_.end()) return it->second;
    bool r = prove(s, goal).provable;
    proofs_[key] = r;
    return r;
  }

  std::optional<CapFailure> visit_collective(const Interaction& act, const ChorPtr& next, const IllContext& ctx) {
    auto col = collective(act);
    CapFailure fail;
    fail.interaction = print_interaction(act);
    if (col.others.size() > kMaxParticipants) {
      fail.code = "TooManyParticipants";
      fail.message = std::to_string(col.others.size()) + " participants exceed the limit of " +
                     std::to_string(kMaxParticipants);
      return fail;
    }
    std::size_t n = col.others.size();
    std::vector<std::vector<bool>> subsets;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      std::vector<bool> flags(n);
      for (std::size_t i = 0; i < n; ++i) flags[i] = (m >> i) & 1u;
      if (eval_quality(col.q, flags)) subsets.push_back(std::move(flags));
    }
    if (subsets.empty()) {
      fail.code = "NoSatisfyingSubset";
      fail.message = "no subset of participants satisfies " + print_quality(col.q);
      return fail;
    }
    for (const auto& flags : subsets) {
      std::vector<AnnotatedThread> parts{col.leader};
      for (std::size_t i = 0; i < n; ++i)
        if (flags[i]) parts.push_back(col.others[i]);
      if (auto r = try_subset(col, parts, next, ctx)) {
        r->interaction = r->interaction.empty() ? fail.interaction : r->interaction;
        return r;
      }
    }
    return std::nullopt;
  }

  std::optional<CapFailure> try_subset(const Collective& col, const std::vector<AnnotatedThread>& parts,
                                       const ChorPtr& next, const IllContext& ctx) {
    std::vector<FormulaPtr> goal_atoms;
    for (const auto& p : parts) goal_atoms.push_back(ill::own(p.thread, col.key, p.role, p.req));
    auto goal = ill::tensor_all(goal_atoms);
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < ctx.size(); ++i)
      for (const auto& p : parts)
        if (formula_mentions(ctx[i], p.thread, col.key)) {
          cand.push_back(i);
          break;
        }
    std::optional<CapFailure> inner;
    std::set<std::string> seen;
    std::size_t m = cand.size() > 20 ? 20 : cand.size();
    for (std::uint32_t mask = (1u << m) - 1;; --mask) {
      IllContext chosen, rest;
      std::vector<bool> take(ctx.size(), false);
      for (std::size_t b = 0; b < m; ++b)
        if ((mask >> b) & 1u) take[cand[b]] = true;
      for (std::size_t i = 0; i < ctx.size(); ++i) (take[i] ? chosen : rest).push_back(ctx[i]);
      if (seen.insert(ctx_key(chosen)).second && provable(chosen, goal)) {
        for (const auto& p : parts) rest.push_back(ill::own(p.thread, col.key, p.role, p.off));
        auto r = check(next, sorted(std::move(rest)));
        if (!r) return std::nullopt;
        if (!inner) inner = r;
      }
      if (mask == 0) break;
    }
    if (inner) return inner;
    CapFailure f;
    f.code = "CapabilityUnderivable";
    for (const auto& p : parts) f.subset.push_back(p.thread);
    std::vector<FormulaPtr> have;
    for (const auto& i : cand) formula_atoms(ctx[i], have);
    IllContext cands;
    for (const auto& i : cand) cands.push_back(ctx[i]);
    for (const auto& g : goal_atoms) {
      bool present = std::any_of(have.begin(), have.end(), [&](const FormulaPtr& h) { return h->key == g->key; });
      if (!present) f.missing.push_back(g->key);
    }
    f.sequent = print_context(cands) + " |- " + goal->key;
    std::string who;
    for (const auto& t : f.subset) who += (who.empty() ? "" : ",") + t.str();
    f.message = "capabilities for {" + who + "} are not derivable";
    return f;
  }

  std::map<std::string, std::optional<CapFailure>> memo_;
  std::map<std::string, bool> proofs_;
};

std::set<std::string> context_names(const IllContext& psi) {
  std::set<std::string> out;
  std::vector<FormulaPtr> atoms;
  for (const auto& f : psi) formula_atoms(f, atoms);
  for (const auto& a : atoms) {
    out.insert(a->thread.str());
    out.insert(a->session.str());
  }
  return out;
}

}  // namespace

CapReport check_capabilities(const IllContext& psi, const ChorPtr& c) {
  CapReport rep;
  for (const auto& f : psi) {
    if (!lolli_free(f)) {
      rep.ok = false;
      rep.failures.push_back({"ContextHasLolli", "", {}, {}, "", "context formula " + f->key + " contains -o"});
      return rep;
    }
  }
  Checker ch;
  if (auto r = ch.check(rename_apart(c, context_names(psi)), sorted(psi))) {
    rep.ok = false;
    rep.failures.push_back(*r);
  }
  return rep;
}

namespace {

using Entries = std::vector<std::pair<CapabilityState::Key, CapSet>>;

bool sat(const Entries& es, const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True: return true;
    case Formula::Kind::Own:
      return std::any_of(es.begin(), es.end(), [&](const auto& e) {
        return e.first.first == f->thread && e.first.second == f->session && e.second == f->caps;
      });
    case Formula::Kind::Tensor: {
      std::size_t n = es.size();
      if (n > 20) return false;
      for (std::uint32_t m = 0; m < (1u << n); ++m) {
        Entries a, b;
        for (std::size_t i = 0; i < n; ++i) ((m >> i) & 1u ? a : b).push_back(es[i]);
        if (sat(a, f->left) && sat(b, f->right)) return true;
      }
      return false;
    }
    case Formula::Kind::Plus: return sat(es, f->left) || sat(es, f->right);
    case Formula::Kind::Lolli: return false;
  }
  return false;
}

}  // namespace

bool state_satisfies(const CapabilityState& sigma, const FormulaPtr& f) {
  Entries es(sigma.entries().begin(), sigma.entries().end());
  return sat(es, f);
}

bool state_satisfies(const CapabilityState& sigma, const IllContext& psi) {
  return std::all_of(psi.begin(), psi.end(), [&](const FormulaPtr& f) { return state_satisfies(sigma, f); });
}

IllContext state_context(const CapabilityState& sigma, const std::map<CapabilityState::Key, Role>& roles) {
  IllContext out;
  for (const auto& [key, caps] : sigma.entries()) {
    auto it = roles.find(key);
    if (it == roles.end()) continue;
    out.push_back(ill::own(key.first, key.second, it->second, caps));
  }
  return out;
}

}  // namespace gcq
