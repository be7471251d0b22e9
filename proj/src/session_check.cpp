#include "gcq/session_check.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace gcq {

SessionEnv env_from_program(const Program& p) {
  SessionEnv g;
  for (const auto& s : p.services) g.services[s.name] = {s.type, s.actives, s.services, s.has_split};
  return g;
}

nlohmann::json session_report_json(const SessionReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back({{"code", f.code}, {"interaction", f.interaction}, {"message", f.message}});
  return j;
}

std::vector<GTypePtr> gtype_residuals(const GTypePtr& g, const TypeLabel& alpha) {
  std::vector<GTypePtr> out;
  for (const auto& [lab, res] : gtype_heads(g)) {
    if (!type_label_matches(lab, alpha)) continue;
    bool dup = std::any_of(out.begin(), out.end(), [&](const GTypePtr& o) { return gtype_equal(o, res); });
    if (!dup) out.push_back(res);
  }
  return out;
}

namespace {

std::set<Role> role_set(const std::vector<Role>& rs) { return {rs.begin(), rs.end()}; }

std::vector<Role> roles_of(const std::vector<AnnotatedThread>& ps) {
  std::vector<Role> out;
  for (const auto& p : ps) out.push_back(p.role);
  return out;
}

class SessionChecker {
 public:
  std::optional<SessionFailure> check(const ChorPtr& c, const SessionEnv& g, const DeltaEnv& d) {
    if (c->is_end()) {
      std::string open;
      for (const auto& [k, t] : d)
        if (!t->is_end()) open += (open.empty() ? "" : ", ") + k.str() + ": " + print_gtype(t);
      if (open.empty()) return std::nullopt;
      return fail("ProtocolResidue", "", "sessions not finished at end: " + open);
    }
    if (auto* n = std::get_if<Chor::New>(&c->node)) return check(n->body, g, d);
    if (auto* i = std::get_if<Chor::If>(&c->node)) {
      std::string why;
      if (!check_sort(i->guard, Sort::Bool, var_sorts(g, i->at), &why))
        return fail("NotAProposition", "if " + print_expr(i->guard) + " @ " + i->at.str(), why);
      if (auto r = check(i->then_branch, g, d)) return r;
      return check(i->else_branch, g, d);
    }
    const auto& s = std::get<Chor::Seq>(c->node);
    return std::visit([&](const auto& a) { return step(a, s.next, g, d); }, s.act);
  }

 private:
  static SessionFailure fail(std::string code, std::string where, std::string msg) {
    return {std::move(code), std::move(where), std::move(msg)};
  }

  static std::function<std::optional<Sort>(const VarName&)> var_sorts(const SessionEnv& g, const Thread& t) {
    return [&g, t](const VarName& v) -> std::optional<Sort> {
      auto it = g.vars.find({v, t});
      if (it == g.vars.end()) return std::nullopt;
      return it->second;
    };
  }

  std::optional<SessionFailure> owned(const SessionEnv& g, const AnnotatedThread& p, const SessionKey& k,
                                      const std::string& where) {
    auto it = g.owners.find({p.thread, k});
    if (it == g.owners.end() || it->second != p.role)
      return fail("RoleNotOwned", where, p.thread.str() + " does not own role " + p.role.str() + " in " + k.str());
    return std::nullopt;
  }

  std::optional<SessionFailure> step(const Init& i, const ChorPtr& next, const SessionEnv& g, const DeltaEnv& d) {
    auto where = print_interaction(i);
    auto it = g.services.find(i.service);
    if (it == g.services.end()) return fail("UnknownService", where, "service " + i.service.str() + " is not declared");
    const auto& st = it->second;
    auto act = role_set(roles_of(i.actives));
    auto svc = role_set(roles_of(i.services));
    if (st.has_split) {
      if (act != role_set(st.actives) || svc != role_set(st.services))
        return fail("ServiceSplitMismatch", where, "roles do not match the declared active/service split");
    } else {
      auto all = act;
      all.insert(svc.begin(), svc.end());
      if (all != gtype_roles(st.type))
        return fail("ServiceSplitMismatch", where, "roles do not match the roles of the service type");
    }
    if (d.count(i.key)) return fail("FreshnessViolation", where, "session " + i.key.str() + " already running");
    for (const auto& s : i.services)
      for (const auto& [key, role] : g.owners)
        if (key.first == s.thread)
          return fail("FreshnessViolation", where, "service thread " + s.thread.str() + " is not fresh");
    SessionEnv g2 = g;
    for (const auto& p : participants(i)) g2.owners[{p.thread, i.key}] = p.role;
    DeltaEnv d2 = d;
    d2[i.key] = st.type;
    return check(next, g2, d2);
  }

  // Shared tail of the communication rules.
  std::optional<SessionFailure> advance(const TypeLabel& alpha, const std::string& where, const SessionKey& k,
                                        const ChorPtr& next, const SessionEnv& g, const DeltaEnv& d,
                                        const std::function<std::optional<SessionFailure>(const TypeLabel&)>& sorts,
                                        const std::function<void(SessionEnv&, Sort)>& bind) {
    auto dk = d.find(k);
    if (dk == d.end()) return fail("UnknownSession", where, "session " + k.str() + " has no protocol");
    std::optional<SessionFailure> last;
    bool role_match = false;
    for (const auto& [lab, res] : gtype_heads(dk->second)) {
      TypeLabel shape = alpha;
      shape.sort.reset();
      shape.label.reset();
      if (!type_label_matches(lab, shape)) continue;
      role_match = true;
      if (alpha.kind == TypeLabel::Kind::Sel && lab.label != alpha.label) continue;
      if (auto e = sorts(lab)) {
        last = e;
        continue;
      }
      SessionEnv g2 = g;
      if (lab.sort) bind(g2, *lab.sort);
      DeltaEnv d2 = d;
      d2[k] = res;
      auto r = check(next, g2, d2);
      if (!r) return std::nullopt;
      last = r;
    }
    if (last) return last;
    if (role_match && alpha.kind == TypeLabel::Kind::Sel)
      return fail("LabelNotOffered", where, "label " + alpha.label->str() + " not offered by " + print_gtype(dk->second));
    return fail("ProtocolMismatch", where,
                print_type_label(alpha) + " is not enabled in " + k.str() + ": " + print_gtype(dk->second));
  }

  std::optional<SessionFailure> step(const Bcast& b, const ChorPtr& next, const SessionEnv& g, const DeltaEnv& d) {
    auto where = print_interaction(b);
    if (auto e = owned(g, b.sender, b.key, where)) return e;
    for (const auto& r : b.receivers)
      if (auto e = owned(g, r.at, b.key, where)) return e;
    TypeLabel alpha{TypeLabel::Kind::Bcast, b.sender.role, {}, std::nullopt, std::nullopt};
    for (const auto& r : b.receivers) alpha.many.push_back(r.at.role);
    return advance(
        alpha, where, b.key, next, g, d,
        [&](const TypeLabel& lab) -> std::optional<SessionFailure> {
          std::string why;
          if (!check_sort(b.expr, *lab.sort, var_sorts(g, b.sender.thread), &why))
            return fail("SortMismatch", where, "payload is not of sort " + std::string(sort_name(*lab.sort)) + ": " + why);
          return std::nullopt;
        },
        [&](SessionEnv& g2, Sort s) {
          for (const auto& r : b.receivers) g2.vars[{r.var, r.at.thread}] = s;
        });
  }

  std::optional<SessionFailure> step(const Reduce& r, const ChorPtr& next, const SessionEnv& g, const DeltaEnv& d) {
    auto where = print_interaction(r);
    for (const auto& s : r.senders)
      if (auto e = owned(g, s.at, r.key, where)) return e;
    if (auto e = owned(g, r.receiver, r.key, where)) return e;
    TypeLabel alpha{TypeLabel::Kind::Red, r.receiver.role, {}, std::nullopt, std::nullopt};
    for (const auto& s : r.senders) alpha.many.push_back(s.at.role);
    return advance(
        alpha, where, r.key, next, g, d,
        [&](const TypeLabel& lab) -> std::optional<SessionFailure> {
          for (const auto& s : r.senders) {
            std::string why;
            if (!check_sort(s.expr, *lab.sort, var_sorts(g, s.at.thread), &why))
              return fail("SortMismatch", where,
                          "contribution of " + s.at.thread.str() + " is not of sort " + sort_name(*lab.sort) + ": " + why);
          }
          return std::nullopt;
        },
        [&](SessionEnv& g2, Sort s) { g2.vars[{r.var, r.receiver.thread}] = s; });
  }

  std::optional<SessionFailure> step(const Select& s, const ChorPtr& next, const SessionEnv& g, const DeltaEnv& d) {
    auto where = print_interaction(s);
    if (auto e = owned(g, s.sender, s.key, where)) return e;
    for (const auto& r : s.receivers)
      if (auto e = owned(g, r, s.key, where)) return e;
    TypeLabel alpha{TypeLabel::Kind::Sel, s.sender.role, roles_of(s.receivers), std::nullopt, s.label};
    return advance(
        alpha, where, s.key, next, g, d, [](const TypeLabel&) { return std::optional<SessionFailure>{}; },
        [](SessionEnv&, Sort) {});
  }
};

std::set<std::string> env_names(const SessionEnv& g, const DeltaEnv& d) {
  std::set<std::string> out;
  for (const auto& [key, role] : g.owners) {
    out.insert(key.first.str());
    out.insert(key.second.str());
  }
  for (const auto& [k, t] : d) out.insert(k.str());
  return out;
}

}  // namespace

SessionReport check_session_only(const SessionEnv& gamma, const ChorPtr& c, const DeltaEnv& delta) {
  SessionReport rep;
  SessionChecker ch;
  if (auto f = ch.check(rename_apart(c, env_names(gamma, delta)), gamma, delta)) {
    rep.ok = false;
    rep.failures.push_back(*f);
  }
  return rep;
}

FullReport check_session(const SessionEnv& gamma, const IllContext& psi, const ChorPtr& c, const DeltaEnv& delta) {
  return {check_capabilities(psi, c), check_session_only(gamma, c, delta)};
}

namespace {

std::optional<Sort> first_sort(const std::vector<OptValue>& vs) {
  for (const auto& v : vs)
    if (v) return v->sort();
  return std::nullopt;
}

void require_owner(const SessionEnv& g, const AnnotatedThread& p, const SessionKey& k) {
  auto it = g.owners.find({p.thread, k});
  if (it == g.owners.end() || it->second != p.role)
    throw Untypable(p.thread.str() + " does not own role " + p.role.str() + " in " + k.str());
}

}  // namespace

std::optional<std::pair<SessionKey, TypeLabel>> type_label(const GLabel& l, const SessionEnv& gamma) {
  if (l.kind == GLabel::Kind::Tau || l.kind == GLabel::Kind::Init) return std::nullopt;
  const auto& act = *l.act;
  if (auto* b = std::get_if<Bcast>(&act)) {
    require_owner(gamma, b->sender, b->key);
    TypeLabel a{TypeLabel::Kind::Bcast, b->sender.role, {}, std::nullopt, std::nullopt};
    for (const auto& r : b->receivers) {
      require_owner(gamma, r.at, b->key);
      a.many.push_back(r.at.role);
    }
    if (l.value) a.sort = l.value->sort();
    return std::make_pair(b->key, a);
  }
  if (auto* r = std::get_if<Reduce>(&act)) {
    require_owner(gamma, r->receiver, r->key);
    TypeLabel a{TypeLabel::Kind::Red, r->receiver.role, {}, std::nullopt, std::nullopt};
    for (const auto& s : r->senders) {
      require_owner(gamma, s.at, r->key);
      a.many.push_back(s.at.role);
    }
    a.sort = first_sort(l.contributions);
    return std::make_pair(r->key, a);
  }
  const auto& s = std::get<Select>(act);
  require_owner(gamma, s.sender, s.key);
  for (const auto& r : s.receivers) require_owner(gamma, r, s.key);
  return std::make_pair(s.key, TypeLabel{TypeLabel::Kind::Sel, s.sender.role, roles_of(s.receivers), std::nullopt, s.label});
}

}  // namespace gcq
