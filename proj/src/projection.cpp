#include "gcq/projection.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "gcq/parser.hpp"

namespace gcq {

namespace {

std::vector<Role> roles_of(const std::vector<AnnotatedThread>& ps) {
  std::vector<Role> out;
  for (const auto& p : ps) out.push_back(p.role);
  return out;
}

ProcPtr with_cont(const ProcPtr& p, const ProcPtr& c) {
  return std::visit(
      [&](const auto& x) -> ProcPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Proc::End> || std::is_same_v<T, Proc::Branch> || std::is_same_v<T, Proc::If>) {
          return p;
        } else {
          T y = x;
          y.cont = c;
          return ep::make(y);
        }
      },
      p->node);
}

ProcPtr cont_of(const ProcPtr& p) {
  return std::visit(
      [](const auto& x) -> ProcPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Proc::End> || std::is_same_v<T, Proc::Branch> || std::is_same_v<T, Proc::If>)
          return nullptr;
        else return x.cont;
      },
      p->node);
}

// Prefix text with the continuation cut off.
std::string prefix_key(const ProcPtr& p) { return print_proc(with_cont(p, ep::end())); }

// Aligns Q's binder with P's, returning Q's renamed continuation.
ProcPtr align(const ProcPtr& p, const ProcPtr& q, ProcPtr& q_head) {
  ProcPtr qc = cont_of(q);
  q_head = q;
  auto pv = [](const ProcPtr& x) -> std::optional<VarName> {
    if (auto* i = std::get_if<Proc::In>(&x->node)) return i->var;
    if (auto* i = std::get_if<Proc::QIn>(&x->node)) return i->var;
    if (auto* i = std::get_if<Proc::WaitIn>(&x->node)) return i->var;
    return std::nullopt;
  };
  auto pk = [](const ProcPtr& x) -> std::optional<SessionKey> {
    if (auto* r = std::get_if<Proc::Request>(&x->node)) return r->key;
    if (auto* a = std::get_if<Proc::Accept>(&x->node)) return a->key;
    return std::nullopt;
  };
  if (auto a = pv(p), b = pv(q); a && b && *a != *b) {
    qc = proc_rename_var(qc, *b, *a);
    Proc h = *q;
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Proc::In> || std::is_same_v<T, Proc::QIn> ||
                        std::is_same_v<T, Proc::WaitIn>)
            n.var = *a;
        },
        h.node);
    q_head = ep::make(h.node);
  }
  if (auto a = pk(p), b = pk(q); a && b && *a != *b) {
    qc = proc_rename_session(qc, *b, *a);
    Proc h = *q_head;
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Proc::Request> || std::is_same_v<T, Proc::Accept>) n.key = *a;
        },
        h.node);
    q_head = ep::make(h.node);
  }
  return qc;
}

ProcPtr merge_at(const ProcPtr& p, const ProcPtr& q, const std::string& path) {
  if (proc_equal(p, q)) return p;
  auto* bp = std::get_if<Proc::Branch>(&p->node);
  auto* bq = std::get_if<Proc::Branch>(&q->node);
  if (bp && bq) {
    if (bp->key != bq->key || bp->self != bq->self || bp->from != bq->from)
      throw NotMergeable(path, "branchings on different endpoints");
    Proc::Branch out = *bp;
    for (const auto& [l, c] : bq->branches) {
      auto it = out.branches.find(l);
      if (it == out.branches.end()) out.branches[l] = c;
      else it->second = merge_at(it->second, c, path + "/" + l.str());
    }
    return ep::make(out);
  }
  auto* ip = std::get_if<Proc::If>(&p->node);
  auto* iq = std::get_if<Proc::If>(&q->node);
  if (ip && iq) {
    if (!expr_equal(ip->guard, iq->guard)) throw NotMergeable(path, "conditionals with different guards");
    return ep::make(Proc::If{ip->guard, merge_at(ip->then_branch, iq->then_branch, path + "/then"),
                             merge_at(ip->else_branch, iq->else_branch, path + "/else")});
  }
  if (p->node.index() != q->node.index() || !cont_of(p) || !cont_of(q))
    throw NotMergeable(path, "'" + prefix_key(p) + "' and '" + prefix_key(q) + "' differ");
  ProcPtr q_head;
  auto qc = align(p, q, q_head);
  if (prefix_key(p) != prefix_key(q_head))
    throw NotMergeable(path, "'" + prefix_key(p) + "' and '" + prefix_key(q_head) + "' differ");
  auto pre = prefix_key(p);
  return with_cont(p, merge_at(cont_of(p), qc, path + "/" + pre.substr(0, pre.find(" ."))));
}

ProcPtr project(const ChorPtr& c, const Thread& t) {
  return std::visit(
      [&](const auto& x) -> ProcPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::End>) {
          return ep::end();
        } else if constexpr (std::is_same_v<T, Chor::New>) {
          return project(x.body, t);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          auto a = project(x.then_branch, t);
          auto b = project(x.else_branch, t);
          if (x.at == t) return ep::make(Proc::If{x.guard, a, b});
          try {
            return merge(a, b);
          } catch (const NotMergeable& e) {
            throw ProjectionUndefined("projection on " + t.str() + " undefined: " + e.what());
          }
        } else {
          auto next = [&] { return project(x.next, t); };
          return std::visit(
              [&](const auto& a) -> ProcPtr {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, Init>) {
                  if (!a.actives.empty() && a.actives[0].thread == t)
                    return ep::make(Proc::Request{a.service, roles_of(a.actives), roles_of(a.services), a.key, next()});
                  for (std::size_t i = 1; i < a.actives.size(); ++i)
                    if (a.actives[i].thread == t)
                      return ep::make(Proc::Accept{a.service, a.actives[i].role, a.key, false, next()});
                  for (const auto& s : a.services)
                    if (s.thread == t) return ep::make(Proc::Accept{a.service, s.role, a.key, true, next()});
                  return next();
                } else if constexpr (std::is_same_v<A, Bcast>) {
                  std::vector<Role> to;
                  for (const auto& r : a.receivers) to.push_back(r.at.role);
                  if (a.sender.thread == t)
                    return ep::make(Proc::QOut{a.key, a.sender.role, to, a.q, a.expr, next()});
                  for (const auto& r : a.receivers)
                    if (r.at.thread == t) return ep::make(Proc::In{a.key, r.at.role, a.sender.role, r.var, next()});
                  return next();
                } else if constexpr (std::is_same_v<A, Reduce>) {
                  std::vector<Role> from;
                  for (const auto& s : a.senders) from.push_back(s.at.role);
                  if (a.receiver.thread == t)
                    return ep::make(Proc::QIn{a.key, from, a.receiver.role, a.q, a.op, a.var, next()});
                  for (const auto& s : a.senders)
                    if (s.at.thread == t) return ep::make(Proc::Out{a.key, s.at.role, a.receiver.role, s.expr, next()});
                  return next();
                } else {
                  if (a.sender.thread == t)
                    return ep::make(Proc::QSel{a.key, a.sender.role, roles_of(a.receivers), a.q, a.label, next()});
                  for (const auto& r : a.receivers)
                    if (r.thread == t) return ep::make(Proc::Branch{a.key, r.role, a.sender.role, {{a.label, next()}}});
                  return next();
                }
              },
              x.act);
        }
      },
      c->node);
}

// Projections of every service thread started on (a, r), each from its init.
void service_instances(const ChorPtr& c, const ServiceName& a, const Role& r,
                       std::vector<std::pair<Thread, ProcPtr>>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::New>) {
          service_instances(x.body, a, r, out);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          service_instances(x.then_branch, a, r, out);
          service_instances(x.else_branch, a, r, out);
        } else if constexpr (std::is_same_v<T, Chor::Seq>) {
          if (auto* i = std::get_if<Init>(&x.act); i && i->service == a) {
            for (const auto& s : i->services)
              if (s.role == r) out.push_back({s.thread, project(c, s.thread)});
          }
          service_instances(x.next, a, r, out);
        }
      },
      c->node);
}

void init_services(const ChorPtr& c, std::set<std::pair<ServiceName, Role>>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::New>) {
          init_services(x.body, out);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          init_services(x.then_branch, out);
          init_services(x.else_branch, out);
        } else if constexpr (std::is_same_v<T, Chor::Seq>) {
          if (auto* i = std::get_if<Init>(&x.act))
            for (const auto& s : i->services) out.insert({i->service, s.role});
          init_services(x.next, out);
        }
      },
      c->node);
}

}  // namespace

ProcPtr merge(const ProcPtr& p, const ProcPtr& q) { return merge_at(p, q, ""); }

bool mergeable(const ProcPtr& p, const ProcPtr& q) {
  try {
    merge(p, q);
    return true;
  } catch (const NotMergeable&) {
    return false;
  }
}

ProcPtr project_thread(const ChorPtr& c, const Thread& t) { return project(c, t); }

std::set<Thread> service_merge(const ChorPtr& c, const ServiceName& a, const Role& r) {
  std::vector<std::pair<Thread, ProcPtr>> inst;
  service_instances(c, a, r, inst);
  std::set<Thread> out;
  for (const auto& [t, p] : inst) out.insert(t);
  return out;
}

Network epp(const Configuration& conf) {
  Network n;
  n.used = conf.used;
  const auto& c = conf.chor;
  auto fn = free_names(c);
  for (const auto& t : fn.threads) n.components.push_back({t, project(c, t)});
  for (const auto& k : fn.sessions) n.queues[k] = {};
  std::set<std::pair<ServiceName, Role>> groups;
  init_services(c, groups);
  for (const auto& [a, r] : groups) {
    std::vector<std::pair<Thread, ProcPtr>> inst;
    service_instances(c, a, r, inst);
    ProcPtr merged = inst[0].second;
    for (std::size_t i = 1; i < inst.size(); ++i) {
      try {
        merged = merge(merged, inst[i].second);
      } catch (const NotMergeable& e) {
        throw ProjectionUndefined("service group " + a.str() + "[" + r.str() + "] is not mergeable: " + e.what());
      }
    }
    n.components.push_back({inst[0].first, merged});
  }
  for (const auto& r : conf.restricted)
    if (fn.sessions.count(SessionKey(r))) n.restricted.push_back(r);
  return n;
}

Network epp(const ChorPtr& c) { return epp(make_configuration(c)); }

// ---------------------------------------------------------------- linearity

namespace {

struct LinInit {
  const Init* init;
  std::set<Thread> reached;  // threads causally after the init
};

void lin_walk(const ChorPtr& c, std::vector<LinInit> seen, LinearityReport& rep) {
  if (!rep.ok) return;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::New>) {
          lin_walk(x.body, seen, rep);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          lin_walk(x.then_branch, seen, rep);
          lin_walk(x.else_branch, seen, rep);
        } else if constexpr (std::is_same_v<T, Chor::Seq>) {
          std::visit(
              [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, Init>) {
                  for (const auto& s : seen) {
                    if (s.init->service != a.service) continue;
                    for (const auto& p : a.actives) {
                      if (s.reached.count(p.thread)) continue;
                      rep.ok = false;
                      rep.first = print_interaction(*s.init);
                      rep.second = print_interaction(a);
                      rep.message = "active thread " + p.thread.str() + " of the later session on " + a.service.str() +
                                    " does not depend on the earlier one";
                      return;
                    }
                  }
                  // Session start synchronises all its participants.
                  bool touches = false;
                  for (auto& s : seen) {
                    touches = false;
                    for (const auto& p : participants(a)) touches = touches || s.reached.count(p.thread);
                    if (touches)
                      for (const auto& p : participants(a)) s.reached.insert(p.thread);
                  }
                  LinInit me{&a, {}};
                  for (const auto& p : participants(a)) me.reached.insert(p.thread);
                  seen.push_back(me);
                } else {
                  // Data flows from the sending side to the receiving side.
                  std::vector<Thread> src, dst;
                  if constexpr (std::is_same_v<A, Bcast>) {
                    src.push_back(a.sender.thread);
                    for (const auto& r : a.receivers) dst.push_back(r.at.thread);
                  } else if constexpr (std::is_same_v<A, Reduce>) {
                    for (const auto& s : a.senders) src.push_back(s.at.thread);
                    dst.push_back(a.receiver.thread);
                  } else {
                    src.push_back(a.sender.thread);
                    for (const auto& r : a.receivers) dst.push_back(r.thread);
                  }
                  for (auto& s : seen) {
                    bool from = std::any_of(src.begin(), src.end(), [&](const Thread& t) { return s.reached.count(t); });
                    if (from) s.reached.insert(dst.begin(), dst.end());
                  }
                }
              },
              x.act);
          if (rep.ok) lin_walk(x.next, seen, rep);
        }
      },
      c->node);
}

}  // namespace

LinearityReport check_linearity(const ChorPtr& c) {
  LinearityReport rep;
  lin_walk(c, {}, rep);
  return rep;
}

// ---------------------------------------------------------------- pruning

const char* prune_verdict_name(PruneVerdict v) {
  switch (v) {
    case PruneVerdict::Holds: return "holds";
    case PruneVerdict::Fails: return "fails";
    case PruneVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

bool absorbs(const ProcPtr& p, const ProcPtr& q) {
  try {
    return proc_equal(merge(q, p), q);
  } catch (const NotMergeable&) {
    return false;
  }
}

// Unmatched components of Q form the pruned remainder: replicated services
// whose name is not free in the matched part Q0.
bool remainder_ok(const std::vector<Component>& qs, const std::vector<bool>& taken) {
  std::set<ServiceName> q0;
  for (std::size_t j = 0; j < qs.size(); ++j)
    if (taken[j]) {
      auto s = proc_services(qs[j].proc);
      q0.insert(s.begin(), s.end());
    }
  for (std::size_t j = 0; j < qs.size(); ++j) {
    if (taken[j]) continue;
    if (!qs[j].proc->is_replicated()) return false;
    if (q0.count(std::get<Proc::Accept>(qs[j].proc->node).service)) return false;
  }
  return true;
}

bool match_components(const std::vector<Component>& ps, const std::vector<Component>& qs, std::size_t i,
                      std::vector<bool>& taken) {
  if (i == ps.size()) return remainder_ok(qs, taken);
  for (std::size_t j = 0; j < qs.size(); ++j) {
    if (taken[j] || ps[i].proc->is_replicated() != qs[j].proc->is_replicated()) continue;
    if (!absorbs(ps[i].proc, qs[j].proc)) continue;
    taken[j] = true;
    if (match_components(ps, qs, i + 1, taken)) return true;
    taken[j] = false;
  }
  return false;
}

std::string queues_key(const Network& n) {
  std::string s;
  for (const auto& [k, q] : n.queues) {
    s += k.str() + "[";
    for (const auto& m : canonical_queue(q)) s += print_msg(m) + ";";
    s += "]";
  }
  return s;
}

bool merge_absorbed(const Network& p, const Network& q) {
  auto gp = net_gc(p);
  auto gq = net_gc(q);
  if (gp.components.size() > gq.components.size()) return false;
  if (queues_key(gp) != queues_key(gq)) return false;
  std::vector<bool> taken(gq.components.size(), false);
  return match_components(gp.components, gq.components, 0, taken);
}

PruneVerdict simulate(const Network& p, const Network& q, std::size_t depth, std::map<std::string, PruneVerdict>& memo) {
  if (!merge_absorbed(p, q)) return PruneVerdict::Fails;
  if (depth == 0) return PruneVerdict::Inconclusive;
  // Only definite verdicts are memoised, so the key can ignore the depth.
  auto key = net_canonical(p) + "||" + net_canonical(q);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  PruneVerdict result = PruneVerdict::Holds;
  auto pts = net_enabled(p);
  for (const auto& qt : net_enabled(q)) {
    PruneVerdict best = PruneVerdict::Fails;
    for (const auto& pt : pts) {
      if (!elabel_equal(pt.label, qt.label)) continue;
      auto v = simulate(pt.next, qt.next, depth - 1, memo);
      if (v == PruneVerdict::Holds) {
        best = v;
        break;
      }
      if (v == PruneVerdict::Inconclusive) best = v;
    }
    if (best == PruneVerdict::Fails) {
      result = PruneVerdict::Fails;
      break;
    }
    if (best == PruneVerdict::Inconclusive) result = PruneVerdict::Inconclusive;
  }
  if (result != PruneVerdict::Inconclusive) memo[key] = result;
  return result;
}

}  // namespace

bool prunes_structural(const Network& p, const Network& q) { return merge_absorbed(p, q); }

PruneVerdict prunes(const Network& p, const Network& q, std::size_t depth) {
  std::map<std::string, PruneVerdict> memo;
  auto v = simulate(p, q, depth, memo);
  if (v == PruneVerdict::Inconclusive && net_enabled(q).empty()) return PruneVerdict::Holds;
  return v;
}

}  // namespace gcq
