#include "gcq/epq.hpp"

#include <algorithm>
#include <functional>

namespace gcq {

namespace ep {

ProcPtr end() {
  static const ProcPtr e = std::make_shared<const Proc>(Proc{Proc::End{}});
  return e;
}

ProcPtr make(decltype(Proc::node) node) { return std::make_shared<const Proc>(Proc{std::move(node)}); }

}  // namespace ep

namespace {

// Rebuilds `p` with every direct continuation mapped through f.
ProcPtr map_conts(const ProcPtr& p, const std::function<ProcPtr(const ProcPtr&)>& f) {
  return std::visit(
      [&](const auto& x) -> ProcPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Proc::End>) {
          return p;
        } else if constexpr (std::is_same_v<T, Proc::Branch>) {
          T y = x;
          for (auto& [l, c] : y.branches) c = f(c);
          return ep::make(y);
        } else if constexpr (std::is_same_v<T, Proc::If>) {
          T y = x;
          y.then_branch = f(x.then_branch);
          y.else_branch = f(x.else_branch);
          return ep::make(y);
        } else {
          T y = x;
          y.cont = f(x.cont);
          return ep::make(y);
        }
      },
      p->node);
}

bool roles_equal(const std::vector<Role>& a, const std::vector<Role>& b) { return a == b; }

std::string roles_text(const std::vector<Role>& rs) {
  std::string s;
  for (const auto& r : rs) s += (s.empty() ? "" : ", ") + r.str();
  return s;
}

std::optional<SessionKey> bound_key(const ProcPtr& p) {
  if (auto* r = std::get_if<Proc::Request>(&p->node)) return r->key;
  if (auto* a = std::get_if<Proc::Accept>(&p->node)) return a->key;
  return std::nullopt;
}

SessionKey* key_field(Proc& p) {
  return std::visit(
      [](auto& x) -> SessionKey* {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Proc::End> || std::is_same_v<T, Proc::If>) return nullptr;
        else return &x.key;
      },
      p.node);
}

}  // namespace

bool proc_equal(const ProcPtr& a, const ProcPtr& b) {
  if (a == b) return true;
  return print_proc(a) == print_proc(b);
}

ProcPtr proc_subst(const ProcPtr& p, const VarName& x, const OptValue& v) {
  std::map<VarName, OptValue> m{{x, v}};
  auto sub = [&](const ExprPtr& e) { return expr_subst(e, m); };
  Proc q = *p;
  bool shadow = false;
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Proc::QOut> || std::is_same_v<T, Proc::Out>) n.expr = sub(n.expr);
        if constexpr (std::is_same_v<T, Proc::If>) n.guard = sub(n.guard);
        if constexpr (std::is_same_v<T, Proc::In> || std::is_same_v<T, Proc::QIn> || std::is_same_v<T, Proc::WaitIn>)
          shadow = n.var == x;
      },
      q.node);
  auto base = ep::make(q.node);
  if (shadow) return base;
  return map_conts(base, [&](const ProcPtr& c) { return proc_subst(c, x, v); });
}

std::set<std::string> proc_names(const ProcPtr& p) {
  std::set<std::string> out;
  std::function<void(const ProcPtr&)> go = [&](const ProcPtr& q) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (!std::is_same_v<T, Proc::End> && !std::is_same_v<T, Proc::If>) out.insert(n.key.str());
          if constexpr (std::is_same_v<T, Proc::Request> || std::is_same_v<T, Proc::Accept>)
            out.insert(n.service.str());
          if constexpr (std::is_same_v<T, Proc::In> || std::is_same_v<T, Proc::QIn> || std::is_same_v<T, Proc::WaitIn>)
            out.insert(n.var.str());
        },
        q->node);
    map_conts(q, [&](const ProcPtr& c) {
      go(c);
      return c;
    });
  };
  go(p);
  return out;
}

ProcPtr proc_rename_session(const ProcPtr& p, const SessionKey& from, const SessionKey& to) {
  if (from == to || p->is_end()) return p;
  Proc q = *p;
  auto bk = bound_key(p);
  if (!bk || *bk != from) {
    if (auto* k = key_field(q); k && *k == from) *k = to;
  }
  if (bk && *bk == from) {
    // The prefix rebinds `from`: its own key position is a binder, the continuation is shadowed.
    return p;
  }
  auto base = ep::make(q.node);
  if (bk && *bk == to) {
    // Capture: rename the inner binder first.
    auto avoid = proc_names(p);
    avoid.insert(from.str());
    SessionKey fresh(fresh_name(to.str(), avoid));
    Proc r = *base;
    *key_field(r) = fresh;
    auto renamed = map_conts(ep::make(r.node), [&](const ProcPtr& c) { return proc_rename_session(c, to, fresh); });
    return map_conts(renamed, [&](const ProcPtr& c) { return proc_rename_session(c, from, to); });
  }
  return map_conts(base, [&](const ProcPtr& c) { return proc_rename_session(c, from, to); });
}

ProcPtr proc_rename_var(const ProcPtr& p, const VarName& from, const VarName& to) {
  if (from == to || p->is_end()) return p;
  Proc q = *p;
  bool shadow = false;
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Proc::QOut> || std::is_same_v<T, Proc::Out>)
          n.expr = expr_rename_var(n.expr, from, to);
        if constexpr (std::is_same_v<T, Proc::If>) n.guard = expr_rename_var(n.guard, from, to);
        if constexpr (std::is_same_v<T, Proc::In> || std::is_same_v<T, Proc::QIn> || std::is_same_v<T, Proc::WaitIn>)
          shadow = n.var == from;
      },
      q.node);
  auto base = ep::make(q.node);
  if (shadow) return base;
  return map_conts(base, [&](const ProcPtr& c) { return proc_rename_var(c, from, to); });
}

std::set<SessionKey> proc_free_sessions(const ProcPtr& p) {
  std::set<SessionKey> out;
  if (p->is_end()) return out;
  std::set<SessionKey> inner;
  map_conts(p, [&](const ProcPtr& c) {
    auto s = proc_free_sessions(c);
    inner.insert(s.begin(), s.end());
    return c;
  });
  auto bk = bound_key(p);
  if (bk) inner.erase(*bk);
  out = inner;
  if (!bk) {
    Proc q = *p;
    if (auto* k = key_field(q)) out.insert(*k);
  }
  return out;
}

std::set<ServiceName> proc_services(const ProcPtr& p) {
  std::set<ServiceName> out;
  if (auto* r = std::get_if<Proc::Request>(&p->node)) out.insert(r->service);
  if (auto* a = std::get_if<Proc::Accept>(&p->node)) out.insert(a->service);
  map_conts(p, [&](const ProcPtr& c) {
    auto s = proc_services(c);
    out.insert(s.begin(), s.end());
    return c;
  });
  return out;
}

// ---------------------------------------------------------------- queues

namespace {

std::set<Role> out_roles(const OutMsg& m) {
  std::set<Role> s;
  for (const auto& [r, b] : m.to) s.insert(r);
  return s;
}

std::set<Role> in_roles(const InMsg& m) {
  std::set<Role> s;
  for (const auto& sl : m.from) s.insert(sl.role);
  return s;
}

bool disjoint(const std::set<Role>& a, const std::set<Role>& b) {
  return std::none_of(a.begin(), a.end(), [&](const Role& r) { return b.count(r) > 0; });
}

}  // namespace

bool msgs_commute(const QueueMsg& a, const QueueMsg& b) {
  auto* oa = std::get_if<OutMsg>(&a);
  auto* ob = std::get_if<OutMsg>(&b);
  if (oa && ob) return oa->from != ob->from || disjoint(out_roles(*oa), out_roles(*ob));
  auto* ia = std::get_if<InMsg>(&a);
  auto* ib = std::get_if<InMsg>(&b);
  if (ia && ib) return disjoint(in_roles(*ia), in_roles(*ib)) || ia->to != ib->to;
  // Mixed pair: independent unless some sender-receiver pair is shared.
  const OutMsg* o = oa ? oa : ob;
  const InMsg* i = ia ? ia : ib;
  auto ins = in_roles(*i);
  auto outs = out_roles(*o);
  bool o_sends_to_i = std::find(ins.begin(), ins.end(), o->from) != ins.end() &&
                      std::find(outs.begin(), outs.end(), i->to) != outs.end();
  return !o_sends_to_i;
}

std::vector<std::size_t> accessible(const Queue& q) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < i && ok; ++j) ok = msgs_commute(q[j], q[i]);
    if (ok) out.push_back(i);
  }
  return out;
}

std::string print_msg(const QueueMsg& m) {
  if (auto* o = std::get_if<OutMsg>(&m)) {
    std::string s = "(" + o->from.str() + ", [" + print_quality(o->q) + "] <";
    bool first = true;
    for (const auto& [r, b] : o->to) {
      s += (first ? "" : ", ") + r.str() + ":" + (b ? "true" : "false");
      first = false;
    }
    s += "> : " + (o->is_select ? "label " + o->label.str() : opt_to_string(o->value)) + ")";
    return s;
  }
  const auto& i = std::get<InMsg>(m);
  std::string s = "([" + print_quality(i.q) + "] <";
  bool first = true;
  for (const auto& sl : i.from) {
    s += (first ? "" : ", ") + sl.role.str() + ":" + (sl.done ? "true" : "false") + ":" + opt_to_string(sl.value);
    first = false;
  }
  return s + ">, " + i.to.str() + ")";
}

Queue canonical_queue(const Queue& q) {
  Queue rest = q, out;
  while (!rest.empty()) {
    auto acc = accessible(rest);
    std::size_t best = acc[0];
    for (auto i : acc)
      if (print_msg(rest[i]) < print_msg(rest[best])) best = i;
    out.push_back(rest[best]);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

// ---------------------------------------------------------------- labels

const char* elabel_kind_name(ELabel::Kind k) {
  switch (k) {
    case ELabel::Kind::Tau: return "tau";
    case ELabel::Kind::Start: return "start";
    case ELabel::Kind::BcOut: return "bcast-out";
    case ELabel::Kind::BcIn: return "bcast-in";
    case ELabel::Kind::RdOut: return "reduce-out";
    case ELabel::Kind::RdIn: return "reduce-in";
    case ELabel::Kind::SelOut: return "select-out";
    case ELabel::Kind::SelIn: return "select-in";
    case ELabel::Kind::EnqUp: return "enqueue-up";
    case ELabel::Kind::EnqDown: return "enqueue-down";
  }
  return "?";
}

bool elabel_equal(const ELabel& a, const ELabel& b) {
  return a.kind == b.kind && a.key == b.key && a.service == b.service && a.actives == b.actives &&
         a.services == b.services && a.one == b.one && a.many == b.many && a.q == b.q && a.value == b.value &&
         a.label == b.label;
}

std::string print_elabel(const ELabel& l) {
  const std::string k = l.key.str();
  switch (l.kind) {
    case ELabel::Kind::Tau: return "tau";
    case ELabel::Kind::Start:
      return "start(" + roles_text(l.actives) + " ; " + roles_text(l.services) + ") " + l.service.str() + "(" + k + ")";
    case ELabel::Kind::BcOut:
      return k + "[" + l.one.str() + "] -> (" + roles_text(l.many) + ") [" + print_quality(l.q) + "] ! " +
             opt_to_string(l.value);
    case ELabel::Kind::BcIn:
      return k + "[" + l.one.str() + "] -> " + roles_text(l.many) + " ? " + opt_to_string(l.value);
    case ELabel::Kind::RdOut:
      return k + "[" + roles_text(l.many) + "] -> " + l.one.str() + " ! " + opt_to_string(l.value);
    case ELabel::Kind::RdIn:
      return k + "(" + roles_text(l.many) + ") -> [" + l.one.str() + "] [" + print_quality(l.q) + "] ? " +
             opt_to_string(l.value);
    case ELabel::Kind::SelOut:
      return k + "[" + l.one.str() + "] -> (" + roles_text(l.many) + ") [" + print_quality(l.q) + "] select " +
             l.label.str();
    case ELabel::Kind::SelIn: return k + "[" + l.one.str() + "] -> " + roles_text(l.many) + " branch " + l.label.str();
    case ELabel::Kind::EnqUp: return "up-tau " + k + "[" + l.one.str() + "]";
    case ELabel::Kind::EnqDown: return "down-tau " + k + "[" + l.one.str() + "]";
  }
  return "?";
}

nlohmann::json elabel_json(const ELabel& l, std::size_t step) {
  nlohmann::json j;
  j["side"] = "endpoint";
  j["step"] = step;
  j["kind"] = elabel_kind_name(l.kind);
  j["thread"] = l.at.empty() ? nlohmann::json(nullptr) : nlohmann::json(l.at.str());
  j["session"] = l.kind == ELabel::Kind::Tau ? nlohmann::json(nullptr) : nlohmann::json(l.key.str());
  auto roles = [](const std::vector<Role>& rs) {
    auto a = nlohmann::json::array();
    for (const auto& r : rs) a.push_back(r.str());
    return a;
  };
  switch (l.kind) {
    case ELabel::Kind::Tau: break;
    case ELabel::Kind::Start:
      j["service"] = l.service.str();
      j["actives"] = roles(l.actives);
      j["services"] = roles(l.services);
      break;
    case ELabel::Kind::SelOut:
    case ELabel::Kind::SelIn:
      j["one"] = l.one.str();
      j["many"] = roles(l.many);
      j["label"] = l.label.str();
      if (l.kind == ELabel::Kind::SelOut) j["quality"] = print_quality(l.q);
      break;
    default:
      j["one"] = l.one.str();
      j["many"] = roles(l.many);
      if (l.kind == ELabel::Kind::BcOut || l.kind == ELabel::Kind::RdIn) j["quality"] = print_quality(l.q);
      if (l.kind != ELabel::Kind::EnqUp && l.kind != ELabel::Kind::EnqDown) j["value"] = value_json(l.value);
      break;
  }
  return j;
}

// ---------------------------------------------------------------- semantics

namespace {

class Stepper {
 public:
  Stepper(const Network& n, const AvailabilityOracle* o, std::size_t step) : n_(n), oracle_(o), step_(step) {}

  std::vector<ETransition> run() {
    for (std::size_t i = 0; i < n_.components.size(); ++i) local(i);
    for (std::size_t i = 0; i < n_.components.size(); ++i) release(i);
    return std::move(out_);
  }

 private:
  bool available(std::size_t i, const SessionKey& k) const {
    if (!oracle_) return true;
    const auto& t = n_.components[i].thread;
    return oracle_->available(step_, k, {t}).count(t) > 0;
  }

  const Queue* queue(const SessionKey& k) const {
    auto it = n_.queues.find(k);
    return it == n_.queues.end() ? nullptr : &it->second;
  }

  void emit(ELabel l, Network next) {
    out_.push_back({std::move(l), std::move(next)});
  }

  void local(std::size_t i) {
    const auto& c = n_.components[i];
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Proc::Request>) start(i, x);
          else if constexpr (std::is_same_v<T, Proc::QOut>) bc_out(i, x);
          else if constexpr (std::is_same_v<T, Proc::In>) bc_in(i, x);
          else if constexpr (std::is_same_v<T, Proc::Out>) rd_out(i, x);
          else if constexpr (std::is_same_v<T, Proc::QIn>) rd_in(i, x);
          else if constexpr (std::is_same_v<T, Proc::QSel>) sel(i, x);
          else if constexpr (std::is_same_v<T, Proc::Branch>) br(i, x);
          else if constexpr (std::is_same_v<T, Proc::If>) cond(i, x);
        },
        c.proc->node);
  }

  void release(std::size_t i) {
    const auto& c = n_.components[i];
    if (auto* w = std::get_if<Proc::WaitOut>(&c.proc->node)) wait_out(i, *w);
    if (auto* w = std::get_if<Proc::WaitIn>(&c.proc->node)) wait_in(i, *w);
  }

  // Init: requester, one single-shot acceptor per further active role, one
  // replicated service per service role.
  void start(std::size_t i, const Proc::Request& r) {
    std::vector<std::vector<std::size_t>> options;
    auto find = [&](const Role& role, bool repl) {
      std::vector<std::size_t> v;
      for (std::size_t j = 0; j < n_.components.size(); ++j) {
        if (j == i) continue;
        auto* a = std::get_if<Proc::Accept>(&n_.components[j].proc->node);
        if (a && a->service == r.service && a->role == role && a->replicated == repl) v.push_back(j);
      }
      return v;
    };
    for (std::size_t a = 1; a < r.actives.size(); ++a) options.push_back(find(r.actives[a], false));
    for (const auto& s : r.services) options.push_back(find(s, true));
    std::vector<std::size_t> pick(options.size());
    std::function<void(std::size_t)> go = [&](std::size_t d) {
      if (d == options.size()) {
        std::set<std::size_t> once;
        for (std::size_t a = 0; a + 1 < r.actives.size(); ++a)
          if (!once.insert(pick[a]).second) return;
        fire_start(i, r, pick);
        return;
      }
      for (auto j : options[d]) {
        pick[d] = j;
        go(d + 1);
      }
    };
    go(0);
  }

  void fire_start(std::size_t i, const Proc::Request& r, const std::vector<std::size_t>& pick) {
    Network next = n_;
    std::size_t n_act = r.actives.size() - 1;
    std::vector<Component> spawned;
    for (std::size_t s = 0; s < r.services.size(); ++s) {
      const auto& src = n_.components[pick[n_act + s]];
      auto name = fresh_name(src.thread.str(), next.used);
      next.used.insert(name);
      spawned.push_back({Thread(name), src.proc});
    }
    SessionKey key(fresh_name(r.key.str(), next.used));
    next.used.insert(key.str());
    next.restricted.push_back(key.str());
    auto open = [&](const ProcPtr& p) {
      const auto& a = std::get<Proc::Accept>(p->node);
      return proc_rename_session(a.cont, a.key, key);
    };
    next.components[i].proc = proc_rename_session(r.cont, r.key, key);
    for (std::size_t a = 0; a < n_act; ++a) next.components[pick[a]].proc = open(n_.components[pick[a]].proc);
    for (auto& s : spawned) {
      s.proc = open(s.proc);
      next.components.push_back(s);
    }
    next.queues[key] = {};
    ELabel l;
    l.kind = ELabel::Kind::Start;
    l.key = key;
    l.service = r.service;
    l.actives = r.actives;
    l.services = r.services;
    l.at = n_.components[i].thread;
    emit(std::move(l), std::move(next));
  }

  void bc_out(std::size_t i, const Proc::QOut& o) {
    if (!queue(o.key)) return;
    Network next = n_;
    OutMsg m{o.from, o.q, {}, false, eval(o.expr), Label()};
    for (const auto& r : o.to) m.to.push_back({r, false});
    next.queues[o.key].push_back(m);
    next.components[i].proc = ep::make(Proc::WaitOut{o.key, o.from, o.to, o.cont});
    ELabel l;
    l.kind = ELabel::Kind::EnqUp;
    l.key = o.key;
    l.one = o.from;
    l.many = o.to;
    l.at = n_.components[i].thread;
    emit(std::move(l), std::move(next));
  }

  void sel(std::size_t i, const Proc::QSel& s) {
    if (!queue(s.key)) return;
    Network next = n_;
    OutMsg m{s.from, s.q, {}, true, std::nullopt, s.label};
    for (const auto& r : s.to) m.to.push_back({r, false});
    next.queues[s.key].push_back(m);
    next.components[i].proc = ep::make(Proc::WaitOut{s.key, s.from, s.to, s.cont});
    ELabel l;
    l.kind = ELabel::Kind::EnqUp;
    l.key = s.key;
    l.one = s.from;
    l.many = s.to;
    l.at = n_.components[i].thread;
    emit(std::move(l), std::move(next));
  }

  void rd_in(std::size_t i, const Proc::QIn& r) {
    if (!queue(r.key)) return;
    Network next = n_;
    InMsg m{r.q, {}, r.self};
    for (const auto& a : r.from) m.from.push_back({a, false, std::nullopt});
    next.queues[r.key].push_back(m);
    next.components[i].proc = ep::make(Proc::WaitIn{r.key, r.from, r.self, r.op, r.var, r.cont});
    ELabel l;
    l.kind = ELabel::Kind::EnqDown;
    l.key = r.key;
    l.one = r.self;
    l.many = r.from;
    l.at = n_.components[i].thread;
    emit(std::move(l), std::move(next));
  }

  static int out_slot(const OutMsg& m, const Role& r) {
    for (std::size_t j = 0; j < m.to.size(); ++j)
      if (m.to[j].first == r) return static_cast<int>(j);
    return -1;
  }

  static int in_slot(const InMsg& m, const Role& r) {
    for (std::size_t j = 0; j < m.from.size(); ++j)
      if (m.from[j].role == r) return static_cast<int>(j);
    return -1;
  }

  void bc_in(std::size_t i, const Proc::In& in) {
    const Queue* q = queue(in.key);
    if (!q || !available(i, in.key)) return;
    for (auto idx : accessible(*q)) {
      auto* m = std::get_if<OutMsg>(&(*q)[idx]);
      if (!m || m->is_select || m->from != in.from) continue;
      int s = out_slot(*m, in.self);
      if (s < 0 || m->to[s].second) continue;
      Network next = n_;
      std::get<OutMsg>(next.queues[in.key][idx]).to[s].second = true;
      next.components[i].proc = proc_subst(in.cont, in.var, m->value);
      ELabel l;
      l.kind = ELabel::Kind::BcIn;
      l.key = in.key;
      l.one = in.from;
      l.many = {in.self};
      l.value = m->value;
      l.at = n_.components[i].thread;
      emit(std::move(l), std::move(next));
    }
  }

  void br(std::size_t i, const Proc::Branch& b) {
    const Queue* q = queue(b.key);
    if (!q || !available(i, b.key)) return;
    for (auto idx : accessible(*q)) {
      auto* m = std::get_if<OutMsg>(&(*q)[idx]);
      if (!m || !m->is_select || m->from != b.from) continue;
      int s = out_slot(*m, b.self);
      if (s < 0 || m->to[s].second) continue;
      auto it = b.branches.find(m->label);
      if (it == b.branches.end()) continue;
      Network next = n_;
      std::get<OutMsg>(next.queues[b.key][idx]).to[s].second = true;
      next.components[i].proc = it->second;
      ELabel l;
      l.kind = ELabel::Kind::SelIn;
      l.key = b.key;
      l.one = b.from;
      l.many = {b.self};
      l.label = m->label;
      l.at = n_.components[i].thread;
      emit(std::move(l), std::move(next));
    }
  }

  void rd_out(std::size_t i, const Proc::Out& o) {
    const Queue* q = queue(o.key);
    if (!q || !available(i, o.key)) return;
    for (auto idx : accessible(*q)) {
      auto* m = std::get_if<InMsg>(&(*q)[idx]);
      if (!m || m->to != o.to) continue;
      int s = in_slot(*m, o.self);
      if (s < 0 || m->from[s].done) continue;
      Network next = n_;
      auto v = eval(o.expr);
      auto& slot = std::get<InMsg>(next.queues[o.key][idx]).from[s];
      slot.done = true;
      slot.value = v;
      next.components[i].proc = o.cont;
      ELabel l;
      l.kind = ELabel::Kind::RdOut;
      l.key = o.key;
      l.one = o.to;
      l.many = {o.self};
      l.value = v;
      l.at = n_.components[i].thread;
      emit(std::move(l), std::move(next));
    }
  }

  void cond(std::size_t i, const Proc::If& c) {
    Network next = n_;
    next.components[i].proc = eval_guard(c.guard) ? c.then_branch : c.else_branch;
    ELabel l;
    l.kind = ELabel::Kind::Tau;
    l.at = n_.components[i].thread;
    emit(std::move(l), std::move(next));
  }

  // Component index of a straggler waiting on `pred`, excluding `self`.
  template <typename Pred>
  std::optional<std::size_t> find_component(std::size_t self, Pred pred) const {
    for (std::size_t j = 0; j < n_.components.size(); ++j)
      if (j != self && pred(*n_.components[j].proc)) return j;
    return std::nullopt;
  }

  void wait_out(std::size_t i, const Proc::WaitOut& w) {
    const Queue* q = queue(w.key);
    if (!q) return;
    for (auto idx : accessible(*q)) {
      auto* m = std::get_if<OutMsg>(&(*q)[idx]);
      if (!m || m->from != w.from) continue;
      std::vector<Role> roles;
      std::vector<bool> flags;
      for (const auto& [r, b] : m->to) {
        roles.push_back(r);
        flags.push_back(b);
      }
      if (!roles_equal(roles, w.to) || !eval_quality(m->q, flags)) continue;
      Network next = n_;
      bool ok = true;
      for (const auto& [r, b] : m->to) {
        if (b) continue;
        if (m->is_select) {
          auto j = find_component(i, [&](const Proc& p) {
            auto* br = std::get_if<Proc::Branch>(&p.node);
            return br && br->key == w.key && br->self == r && br->from == w.from;
          });
          if (!j) {
            ok = false;
            break;
          }
          next.components[*j].proc = ep::end();
        } else {
          auto j = find_component(i, [&](const Proc& p) {
            auto* in = std::get_if<Proc::In>(&p.node);
            return in && in->key == w.key && in->self == r && in->from == w.from;
          });
          if (!j) {
            ok = false;
            break;
          }
          const auto& in = std::get<Proc::In>(n_.components[*j].proc->node);
          next.components[*j].proc = proc_subst(in.cont, in.var, std::nullopt);
        }
      }
      if (!ok) continue;
      auto& nq = next.queues[w.key];
      nq.erase(nq.begin() + static_cast<std::ptrdiff_t>(idx));
      next.components[i].proc = w.cont;
      ELabel l;
      l.kind = m->is_select ? ELabel::Kind::SelOut : ELabel::Kind::BcOut;
      l.key = w.key;
      l.one = w.from;
      l.many = w.to;
      l.q = m->q;
      l.value = m->value;
      l.label = m->label;
      l.at = n_.components[i].thread;
      emit(std::move(l), std::move(next));
    }
  }

  void wait_in(std::size_t i, const Proc::WaitIn& w) {
    const Queue* q = queue(w.key);
    if (!q) return;
    for (auto idx : accessible(*q)) {
      auto* m = std::get_if<InMsg>(&(*q)[idx]);
      if (!m || m->to != w.self) continue;
      std::vector<Role> roles;
      std::vector<bool> flags;
      std::vector<OptValue> slots;
      for (const auto& s : m->from) {
        roles.push_back(s.role);
        flags.push_back(s.done);
        slots.push_back(s.done ? s.value : std::nullopt);
      }
      if (!roles_equal(roles, w.from) || !eval_quality(m->q, flags)) continue;
      Network next = n_;
      bool ok = true;
      for (const auto& s : m->from) {
        if (s.done) continue;
        auto j = find_component(i, [&](const Proc& p) {
          auto* o = std::get_if<Proc::Out>(&p.node);
          return o && o->key == w.key && o->self == s.role && o->to == w.self;
        });
        if (!j) {
          ok = false;
          break;
        }
        next.components[*j].proc = std::get<Proc::Out>(n_.components[*j].proc->node).cont;
      }
      if (!ok) continue;
      auto v = apply_agg(w.op, slots);
      auto& nq = next.queues[w.key];
      nq.erase(nq.begin() + static_cast<std::ptrdiff_t>(idx));
      next.components[i].proc = proc_subst(w.cont, w.var, v);
      ELabel l;
      l.kind = ELabel::Kind::RdIn;
      l.key = w.key;
      l.one = w.self;
      l.many = w.from;
      l.q = m->q;
      l.value = v;
      l.at = n_.components[i].thread;
      emit(std::move(l), std::move(next));
    }
  }

  const Network& n_;
  const AvailabilityOracle* oracle_;
  std::size_t step_;
  std::vector<ETransition> out_;
};

}  // namespace

std::vector<ETransition> net_enabled(const Network& n, const AvailabilityOracle* oracle, std::size_t step) {
  return Stepper(n, oracle, step).run();
}

std::set<Thread> net_threads(const Network& n) {
  std::set<Thread> out;
  for (const auto& c : n.components) out.insert(c.thread);
  return out;
}

Network net_gc(const Network& n) {
  Network out;
  out.used = n.used;
  std::set<std::string> live;
  for (const auto& c : n.components) {
    if (c.proc->is_end()) continue;
    out.components.push_back(c);
    for (const auto& k : proc_free_sessions(c.proc)) live.insert(k.str());
  }
  for (const auto& [k, q] : n.queues) {
    if (q.empty() && !live.count(k.str())) continue;
    out.queues[k] = q;
    live.insert(k.str());
  }
  for (const auto& r : n.restricted)
    if (live.count(r)) out.restricted.push_back(r);
  return out;
}

bool net_completed(const Network& n) {
  for (const auto& c : n.components)
    if (!c.proc->is_end() && !c.proc->is_replicated()) return false;
  for (const auto& [k, q] : n.queues)
    if (!q.empty()) return false;
  return true;
}

bool net_is_inert(const Network& n) {
  auto g = net_gc(n);
  return g.components.empty() && g.queues.empty();
}

std::string net_canonical(const Network& n, bool with_threads) {
  auto g = net_gc(n);
  std::vector<std::string> comps;
  for (const auto& c : g.components)
    comps.push_back((with_threads ? c.thread.str() + ": " : std::string()) +
                    (c.proc->is_replicated() ? "!" : "") + print_proc(c.proc));
  std::sort(comps.begin(), comps.end());
  std::vector<std::string> rs = g.restricted;
  std::sort(rs.begin(), rs.end());
  std::string s = "nu(";
  for (const auto& r : rs) s += r + ",";
  s += ")";
  for (const auto& c : comps) s += " | " + c;
  for (const auto& [k, q] : g.queues) {
    s += " | queue " + k.str() + " [";
    for (const auto& m : canonical_queue(q)) s += print_msg(m) + ";";
    s += "]";
  }
  return s;
}

bool net_congruent(const Network& a, const Network& b) { return net_canonical(a) == net_canonical(b); }

NetTrace net_run(const Network& n, const AvailabilityOracle& oracle, const Policy& policy, std::size_t max_steps) {
  NetTrace tr;
  tr.final = n;
  std::mt19937_64 rng(policy.seed);
  for (std::size_t i = 0;; ++i) {
    auto ts = net_enabled(tr.final, &oracle, i);
    if (ts.empty()) {
      tr.verdict = net_completed(tr.final) ? Verdict::Completed : Verdict::Stuck;
      return tr;
    }
    if (i >= max_steps) {
      tr.verdict = Verdict::Budget;
      return tr;
    }
    std::size_t pick = policy.kind == PolicyKind::Random ? static_cast<std::size_t>(rng() % ts.size()) : 0;
    tr.labels.push_back(ts[pick].label);
    tr.final = std::move(ts[pick].next);
  }
}

}  // namespace gcq
