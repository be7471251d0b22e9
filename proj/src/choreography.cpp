#include "gcq/choreography.hpp"

#include <algorithm>

namespace gcq {

namespace ch {
ChorPtr end() {
  static const ChorPtr e = std::make_shared<Chor>(Chor{Chor::End{}});
  return e;
}
ChorPtr seq(Interaction act, ChorPtr next) {
  return std::make_shared<Chor>(Chor{Chor::Seq{std::move(act), std::move(next)}});
}
ChorPtr if_(ExprPtr guard, Thread at, ChorPtr then_branch, ChorPtr else_branch) {
  return std::make_shared<Chor>(
      Chor{Chor::If{std::move(guard), std::move(at), std::move(then_branch), std::move(else_branch)}});
}
ChorPtr new_(std::string name, ChorPtr body) {
  return std::make_shared<Chor>(Chor{Chor::New{std::move(name), std::move(body)}});
}
}  // namespace ch

AnnotatedThread athr(const std::string& thread, const std::string& role, std::set<std::string> req,
                     std::set<std::string> off) {
  AnnotatedThread a{Thread(thread), Role(role), {}, {}};
  for (const auto& s : req) a.req.insert(CapAtom(s));
  for (const auto& s : off) a.off.insert(CapAtom(s));
  return a;
}

bool interaction_equal(const Interaction& a, const Interaction& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Init>) {
          return x.actives == y.actives && x.services == y.services && x.service == y.service && x.key == y.key;
        } else if constexpr (std::is_same_v<T, Bcast>) {
          if (!(x.key == y.key && x.q == y.q && x.sender == y.sender && expr_equal(x.expr, y.expr))) return false;
          if (x.receivers.size() != y.receivers.size()) return false;
          for (std::size_t i = 0; i < x.receivers.size(); ++i)
            if (!(x.receivers[i].at == y.receivers[i].at && x.receivers[i].var == y.receivers[i].var)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Reduce>) {
          if (!(x.key == y.key && x.q == y.q && x.op == y.op && x.receiver == y.receiver && x.var == y.var))
            return false;
          if (x.senders.size() != y.senders.size()) return false;
          for (std::size_t i = 0; i < x.senders.size(); ++i)
            if (!(x.senders[i].at == y.senders[i].at && expr_equal(x.senders[i].expr, y.senders[i].expr)))
              return false;
          return true;
        } else {
          return x.key == y.key && x.q == y.q && x.sender == y.sender && x.receivers == y.receivers &&
                 x.label == y.label;
        }
      },
      a);
}

bool chor_equal(const ChorPtr& a, const ChorPtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Chor::End>) return true;
        else if constexpr (std::is_same_v<T, Chor::Seq>) return interaction_equal(x.act, y.act) && chor_equal(x.next, y.next);
        else if constexpr (std::is_same_v<T, Chor::If>)
          return x.at == y.at && expr_equal(x.guard, y.guard) && chor_equal(x.then_branch, y.then_branch) &&
                 chor_equal(x.else_branch, y.else_branch);
        else return x.name == y.name && chor_equal(x.body, y.body);
      },
      a->node);
}

std::string interaction_kind(const Interaction& a) {
  switch (a.index()) {
    case 0: return "init";
    case 1: return "bcast";
    case 2: return "reduce";
    default: return "select";
  }
}

SessionKey interaction_session(const Interaction& a) {
  return std::visit([](const auto& x) { return x.key; }, a);
}

std::vector<AnnotatedThread> participants(const Interaction& a) {
  std::vector<AnnotatedThread> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Init>) {
          out = x.actives;
          out.insert(out.end(), x.services.begin(), x.services.end());
        } else if constexpr (std::is_same_v<T, Bcast>) {
          out.push_back(x.sender);
          for (const auto& r : x.receivers) out.push_back(r.at);
        } else if constexpr (std::is_same_v<T, Reduce>) {
          for (const auto& s : x.senders) out.push_back(s.at);
          out.push_back(x.receiver);
        } else {
          out.push_back(x.sender);
          out.insert(out.end(), x.receivers.begin(), x.receivers.end());
        }
      },
      a);
  return out;
}

std::set<Thread> interaction_threads(const Interaction& a) {
  std::set<Thread> out;
  for (const auto& p : participants(a)) out.insert(p.thread);
  return out;
}

std::set<Thread> chor_threads(const ChorPtr& c) {
  std::set<Thread> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::Seq>) {
          out = chor_threads(x.next);
          auto mine = interaction_threads(x.act);
          out.insert(mine.begin(), mine.end());
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          out = chor_threads(x.then_branch);
          auto other = chor_threads(x.else_branch);
          out.insert(other.begin(), other.end());
          out.insert(x.at);
        } else if constexpr (std::is_same_v<T, Chor::New>) {
          out = chor_threads(x.body);
        }
      },
      c->node);
  return out;
}

std::size_t chor_size(const ChorPtr& c) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::Seq>) return 1 + chor_size(x.next);
        else if constexpr (std::is_same_v<T, Chor::If>) return 1 + chor_size(x.then_branch) + chor_size(x.else_branch);
        else if constexpr (std::is_same_v<T, Chor::New>) return chor_size(x.body);
        else return 0;
      },
      c->node);
}

namespace {

void add_expr_vars(const ExprPtr& e, const Thread& t, std::set<VarAt>& out) {
  for (const auto& v : expr_free_vars(e)) out.insert({v, t});
}

template <typename Pred>
void erase_if_set(std::set<VarAt>& s, Pred p) {
  for (auto it = s.begin(); it != s.end();) it = p(*it) ? s.erase(it) : std::next(it);
}

}  // namespace

FreeNames free_names(const ChorPtr& c) {
  FreeNames fn;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::Seq>) {
          fn = free_names(x.next);
          std::visit(
              [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, Init>) {
                  std::set<Thread> bound;
                  for (const auto& s : a.services) bound.insert(s.thread);
                  for (const auto& t : bound) fn.threads.erase(t);
                  erase_if_set(fn.vars, [&](const VarAt& v) { return bound.count(v.second) > 0; });
                  fn.sessions.erase(a.key);
                  fn.services.insert(a.service);
                  for (const auto& p : a.actives) fn.threads.insert(p.thread);
                } else if constexpr (std::is_same_v<A, Bcast>) {
                  for (const auto& r : a.receivers) fn.vars.erase({r.var, r.at.thread});
                  add_expr_vars(a.expr, a.sender.thread, fn.vars);
                  fn.sessions.insert(a.key);
                } else if constexpr (std::is_same_v<A, Reduce>) {
                  fn.vars.erase({a.var, a.receiver.thread});
                  for (const auto& s : a.senders) add_expr_vars(s.expr, s.at.thread, fn.vars);
                  fn.sessions.insert(a.key);
                } else {
                  fn.sessions.insert(a.key);
                }
                if constexpr (!std::is_same_v<A, Init>)
                  for (const auto& p : participants(a)) fn.threads.insert(p.thread);
                for (const auto& p : participants(a)) fn.roles.insert(p.role);
              },
              x.act);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          fn = free_names(x.then_branch);
          auto other = free_names(x.else_branch);
          fn.threads.insert(other.threads.begin(), other.threads.end());
          fn.sessions.insert(other.sessions.begin(), other.sessions.end());
          fn.services.insert(other.services.begin(), other.services.end());
          fn.vars.insert(other.vars.begin(), other.vars.end());
          fn.roles.insert(other.roles.begin(), other.roles.end());
          fn.threads.insert(x.at);
          add_expr_vars(x.guard, x.at, fn.vars);
        } else if constexpr (std::is_same_v<T, Chor::New>) {
          fn = free_names(x.body);
          fn.threads.erase(Thread(x.name));
          fn.sessions.erase(SessionKey(x.name));
          erase_if_set(fn.vars, [&](const VarAt& v) { return v.second.str() == x.name; });
        }
      },
      c->node);
  return fn;
}

std::set<std::string> all_names(const ChorPtr& c) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::Seq>) {
          out = all_names(x.next);
          for (const auto& p : participants(x.act)) out.insert(p.thread.str());
          out.insert(interaction_session(x.act).str());
          std::visit(
              [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, Init>) out.insert(a.service.str());
                else if constexpr (std::is_same_v<A, Bcast>) {
                  for (const auto& r : a.receivers) out.insert(r.var.str());
                  for (const auto& v : expr_free_vars(a.expr)) out.insert(v.str());
                } else if constexpr (std::is_same_v<A, Reduce>) {
                  out.insert(a.var.str());
                  for (const auto& s : a.senders)
                    for (const auto& v : expr_free_vars(s.expr)) out.insert(v.str());
                }
              },
              x.act);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          out = all_names(x.then_branch);
          auto other = all_names(x.else_branch);
          out.insert(other.begin(), other.end());
          out.insert(x.at.str());
          for (const auto& v : expr_free_vars(x.guard)) out.insert(v.str());
        } else if constexpr (std::is_same_v<T, Chor::New>) {
          out = all_names(x.body);
          out.insert(x.name);
        }
      },
      c->node);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  if (!used.count(base)) return base;
  for (std::size_t i = 1;; ++i) {
    auto cand = base + "_" + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------- substitution

namespace {

std::map<VarName, OptValue> at_thread(const Subst& theta, const Thread& t) {
  std::map<VarName, OptValue> m;
  for (const auto& [k, v] : theta)
    if (k.second == t) m.emplace(k.first, v);
  return m;
}

}  // namespace

Interaction substitute_interaction(const Interaction& act, const Subst& theta) {
  return std::visit(
      [&](const auto& a) -> Interaction {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, Bcast>) {
          A b = a;
          b.expr = expr_subst(a.expr, at_thread(theta, a.sender.thread));
          return b;
        } else if constexpr (std::is_same_v<A, Reduce>) {
          A r = a;
          for (auto& s : r.senders) s.expr = expr_subst(s.expr, at_thread(theta, s.at.thread));
          return r;
        } else {
          return a;
        }
      },
      act);
}

ChorPtr substitute(const ChorPtr& c, const Subst& theta) {
  if (theta.empty()) return c;
  return std::visit(
      [&](const auto& x) -> ChorPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::End>) return c;
        else if constexpr (std::is_same_v<T, Chor::Seq>) {
          Subst inner = theta;
          std::visit(
              [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, Init>) {
                  for (const auto& s : a.services)
                    for (auto it = inner.begin(); it != inner.end();)
                      it = it->first.second == s.thread ? inner.erase(it) : std::next(it);
                } else if constexpr (std::is_same_v<A, Bcast>) {
                  for (const auto& r : a.receivers) inner.erase({r.var, r.at.thread});
                } else if constexpr (std::is_same_v<A, Reduce>) {
                  inner.erase({a.var, a.receiver.thread});
                }
              },
              x.act);
          return ch::seq(substitute_interaction(x.act, theta), substitute(x.next, inner));
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          return ch::if_(expr_subst(x.guard, at_thread(theta, x.at)), x.at, substitute(x.then_branch, theta),
                         substitute(x.else_branch, theta));
        } else {
          Subst inner = theta;
          for (auto it = inner.begin(); it != inner.end();)
            it = it->first.second.str() == x.name ? inner.erase(it) : std::next(it);
          return ch::new_(x.name, substitute(x.body, inner));
        }
      },
      c->node);
}

// ---------------------------------------------------------------- renaming

namespace {

AnnotatedThread ren(const AnnotatedThread& a, const Thread& from, const Thread& to) {
  AnnotatedThread b = a;
  if (b.thread == from) b.thread = to;
  return b;
}

Interaction rename_thread_in(const Interaction& act, const Thread& from, const Thread& to, bool services_too) {
  return std::visit(
      [&](const auto& a) -> Interaction {
        using A = std::decay_t<decltype(a)>;
        A b = a;
        if constexpr (std::is_same_v<A, Init>) {
          for (auto& p : b.actives) p = ren(p, from, to);
          if (services_too)
            for (auto& p : b.services) p = ren(p, from, to);
        } else if constexpr (std::is_same_v<A, Bcast>) {
          b.sender = ren(b.sender, from, to);
          for (auto& r : b.receivers) r.at = ren(r.at, from, to);
        } else if constexpr (std::is_same_v<A, Reduce>) {
          for (auto& s : b.senders) s.at = ren(s.at, from, to);
          b.receiver = ren(b.receiver, from, to);
        } else {
          b.sender = ren(b.sender, from, to);
          for (auto& r : b.receivers) r = ren(r, from, to);
        }
        return b;
      },
      act);
}

}  // namespace

ChorPtr rename_thread(const ChorPtr& c, const Thread& from, const Thread& to) {
  if (from == to) return c;
  return std::visit(
      [&](const auto& x) -> ChorPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::End>) return c;
        else if constexpr (std::is_same_v<T, Chor::Seq>) {
          if (auto* init = std::get_if<Init>(&x.act)) {
            bool binds_from = false;
            for (const auto& s : init->services) binds_from = binds_from || s.thread == from;
            if (binds_from) return ch::seq(rename_thread_in(x.act, from, to, false), x.next);
            // avoid capturing `to` with a binder of the same name
            for (const auto& s : init->services) {
              if (s.thread == to && free_names(x.next).threads.count(from)) {
                auto used = all_names(x.next);
                used.insert(to.str());
                Thread fresh(fresh_name(to.str(), used));
                Init i2 = *init;
                for (auto& p : i2.services)
                  if (p.thread == to) p.thread = fresh;
                auto next = rename_thread(x.next, to, fresh);
                return rename_thread(ch::seq(i2, next), from, to);
              }
            }
          }
          return ch::seq(rename_thread_in(x.act, from, to, true), rename_thread(x.next, from, to));
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          return ch::if_(x.guard, x.at == from ? to : x.at, rename_thread(x.then_branch, from, to),
                         rename_thread(x.else_branch, from, to));
        } else {
          if (x.name == from.str()) return c;
          return ch::new_(x.name, rename_thread(x.body, from, to));
        }
      },
      c->node);
}

ChorPtr rename_session(const ChorPtr& c, const SessionKey& from, const SessionKey& to) {
  if (from == to) return c;
  return std::visit(
      [&](const auto& x) -> ChorPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::End>) return c;
        else if constexpr (std::is_same_v<T, Chor::Seq>) {
          if (auto* init = std::get_if<Init>(&x.act)) {
            if (init->key == from) return c;
            if (init->key == to && free_names(x.next).sessions.count(from)) {
              auto used = all_names(x.next);
              used.insert(to.str());
              SessionKey fresh(fresh_name(to.str(), used));
              Init i2 = *init;
              i2.key = fresh;
              return rename_session(ch::seq(i2, rename_session(x.next, to, fresh)), from, to);
            }
            return ch::seq(x.act, rename_session(x.next, from, to));
          }
          Interaction act = std::visit(
              [&](const auto& a) -> Interaction {
                auto b = a;
                if (b.key == from) b.key = to;
                return b;
              },
              x.act);
          return ch::seq(act, rename_session(x.next, from, to));
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          return ch::if_(x.guard, x.at, rename_session(x.then_branch, from, to),
                         rename_session(x.else_branch, from, to));
        } else {
          if (x.name == from.str()) return c;
          return ch::new_(x.name, rename_session(x.body, from, to));
        }
      },
      c->node);
}

ChorPtr rename_var(const ChorPtr& c, const VarAt& from, const VarName& to) {
  const auto& [v, t] = from;
  return std::visit(
      [&](const auto& x) -> ChorPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::End>) return c;
        else if constexpr (std::is_same_v<T, Chor::Seq>) {
          bool stop = false;
          Interaction act = std::visit(
              [&](const auto& a) -> Interaction {
                using A = std::decay_t<decltype(a)>;
                A b = a;
                if constexpr (std::is_same_v<A, Init>) {
                  for (const auto& s : a.services) stop = stop || s.thread == t;
                } else if constexpr (std::is_same_v<A, Bcast>) {
                  if (b.sender.thread == t) b.expr = expr_rename_var(b.expr, v, to);
                  for (const auto& r : a.receivers) stop = stop || (r.var == v && r.at.thread == t);
                } else if constexpr (std::is_same_v<A, Reduce>) {
                  for (auto& s : b.senders)
                    if (s.at.thread == t) s.expr = expr_rename_var(s.expr, v, to);
                  stop = a.var == v && a.receiver.thread == t;
                }
                return b;
              },
              x.act);
          return ch::seq(act, stop ? x.next : rename_var(x.next, from, to));
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          return ch::if_(x.at == t ? expr_rename_var(x.guard, v, to) : x.guard, x.at,
                         rename_var(x.then_branch, from, to), rename_var(x.else_branch, from, to));
        } else {
          if (x.name == t.str()) return c;
          return ch::new_(x.name, rename_var(x.body, from, to));
        }
      },
      c->node);
}

namespace {

struct Apart {
  std::set<std::string> used;     // every name in the term
  std::set<std::string> claimed;  // names already owned by a binder or free occurrence

  std::string claim(const std::string& n) {
    if (!claimed.count(n)) {
      claimed.insert(n);
      return n;
    }
    auto f = fresh_name(n, used);
    used.insert(f);
    claimed.insert(f);
    return f;
  }

  ChorPtr go(const ChorPtr& c) {
    return std::visit(
        [&](const auto& x) -> ChorPtr {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Chor::End>) return c;
          else if constexpr (std::is_same_v<T, Chor::Seq>) {
            ChorPtr next = x.next;
            Interaction act = x.act;
            if (auto* init = std::get_if<Init>(&act)) {
              for (auto& s : init->services) {
                auto n = claim(s.thread.str());
                if (n != s.thread.str()) {
                  next = rename_thread(next, s.thread, Thread(n));
                  s.thread = Thread(n);
                }
              }
              auto k = claim(init->key.str());
              if (k != init->key.str()) {
                next = rename_session(next, init->key, SessionKey(k));
                init->key = SessionKey(k);
              }
            } else if (auto* b = std::get_if<Bcast>(&act)) {
              for (auto& r : b->receivers) {
                auto n = claim(r.var.str());
                if (n != r.var.str()) {
                  next = rename_var(next, {r.var, r.at.thread}, VarName(n));
                  r.var = VarName(n);
                }
              }
            } else if (auto* r = std::get_if<Reduce>(&act)) {
              auto n = claim(r->var.str());
              if (n != r->var.str()) {
                next = rename_var(next, {r->var, r->receiver.thread}, VarName(n));
                r->var = VarName(n);
              }
            }
            return ch::seq(act, go(next));
          } else if constexpr (std::is_same_v<T, Chor::If>) {
            auto a = go(x.then_branch);
            auto b = go(x.else_branch);
            return ch::if_(x.guard, x.at, a, b);
          } else {
            return ch::new_(x.name, go(x.body));
          }
        },
        c->node);
  }
};

}  // namespace

ChorPtr rename_apart(const ChorPtr& c, const std::set<std::string>& avoid) {
  Apart ap;
  ap.used = all_names(c);
  ap.used.insert(avoid.begin(), avoid.end());
  ap.claimed = avoid;
  auto fn = free_names(c);
  for (const auto& t : fn.threads) ap.claimed.insert(t.str());
  for (const auto& k : fn.sessions) ap.claimed.insert(k.str());
  for (const auto& s : fn.services) ap.claimed.insert(s.str());
  for (const auto& v : fn.vars) ap.claimed.insert(v.first.str());
  return ap.go(c);
}

}  // namespace gcq
