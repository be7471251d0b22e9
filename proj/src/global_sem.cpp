#include "gcq/global_sem.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "gcq/parser.hpp"

namespace gcq {

namespace {

std::set<Thread> head_threads(const Head& h) { return h.tau ? std::set<Thread>{h.at} : interaction_threads(h.act); }

bool disjoint(const std::set<Thread>& a, const std::set<Thread>& b) {
  for (const auto& t : a)
    if (b.count(t)) return false;
  return true;
}

// Whether `later` may be moved in front of `first`.
bool can_swap(const Interaction& first, const Head& later) {
  if (!disjoint(interaction_threads(first), head_threads(later))) return false;
  if (later.tau) return true;
  if (auto* i = std::get_if<Init>(&first))
    if (interaction_session(later.act) == i->key) return false;
  if (auto* i = std::get_if<Init>(&later.act)) {
    if (interaction_session(first) == i->key) return false;
  }
  return true;
}

bool same_head(const Head& a, const Head& b) {
  if (a.tau != b.tau) return false;
  if (a.tau) return a.at == b.at && expr_equal(a.guard, b.guard);
  return interaction_equal(a.act, b.act);
}

}  // namespace

std::vector<Head> chor_heads(const ChorPtr& c) {
  std::vector<Head> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::Seq>) {
          Head me;
          me.act = x.act;
          me.residual = x.next;
          out.push_back(me);
          for (auto& h : chor_heads(x.next)) {
            if (!can_swap(x.act, h)) continue;
            if (h.tau) {
              h.then_residual = ch::seq(x.act, h.then_residual);
              h.else_residual = ch::seq(x.act, h.else_residual);
            } else {
              h.residual = ch::seq(x.act, h.residual);
            }
            out.push_back(std::move(h));
          }
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          Head me;
          me.tau = true;
          me.guard = x.guard;
          me.at = x.at;
          me.then_residual = x.then_branch;
          me.else_residual = x.else_branch;
          out.push_back(me);
          auto h1s = chor_heads(x.then_branch);
          auto h2s = chor_heads(x.else_branch);
          for (auto& h1 : h1s) {
            if (head_threads(h1).count(x.at)) continue;
            for (const auto& h2 : h2s) {
              if (!same_head(h1, h2)) continue;
              Head h = h1;
              if (h.tau) {
                h.then_residual = ch::if_(x.guard, x.at, h1.then_residual, h2.then_residual);
                h.else_residual = ch::if_(x.guard, x.at, h1.else_residual, h2.else_residual);
              } else {
                h.residual = ch::if_(x.guard, x.at, h1.residual, h2.residual);
              }
              out.push_back(std::move(h));
              break;
            }
          }
        } else if constexpr (std::is_same_v<T, Chor::New>) {
          for (auto& h : chor_heads(x.body)) {
            if (h.tau) {
              h.then_residual = ch::new_(x.name, h.then_residual);
              h.else_residual = ch::new_(x.name, h.else_residual);
            } else {
              h.residual = ch::new_(x.name, h.residual);
            }
            out.push_back(std::move(h));
          }
        }
      },
      c->node);
  return out;
}

std::string label_kind(const GLabel& l) {
  switch (l.kind) {
    case GLabel::Kind::Tau: return "tau";
    case GLabel::Kind::Init: return "init";
    case GLabel::Kind::Bcast: return "bcast";
    case GLabel::Kind::Reduce: return "reduce";
    case GLabel::Kind::Select: return "select";
  }
  return "?";
}

std::string print_glabel(const GLabel& l) {
  if (l.kind == GLabel::Kind::Tau)
    return "tau@" + l.tau_at.str() + (l.tau_then ? " (then)" : " (else)");
  std::string out = print_interaction(*l.act);
  if (l.kind != GLabel::Kind::Init) {
    out += "  J={";
    for (std::size_t i = 0; i < l.chosen.size(); ++i) out += (i ? "," : "") + l.chosen[i].str();
    out += "}";
  }
  return out;
}

bool glabel_equal(const GLabel& a, const GLabel& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == GLabel::Kind::Tau) return a.tau_at == b.tau_at && a.tau_then == b.tau_then;
  return interaction_equal(*a.act, *b.act) && a.chosen == b.chosen && a.value == b.value &&
         a.contributions == b.contributions;
}

Configuration make_configuration(const ChorPtr& c, CapabilityState sigma) {
  Configuration conf;
  ChorPtr cur = c;
  while (auto* n = std::get_if<Chor::New>(&cur->node)) {
    conf.restricted.push_back(n->name);
    cur = n->body;
  }
  conf.chor = cur;
  conf.sigma = std::move(sigma);
  auto fn = free_names(cur);
  for (const auto& t : fn.threads) conf.used.insert(t.str());
  for (const auto& k : fn.sessions) conf.used.insert(k.str());
  for (const auto& s : fn.services) conf.used.insert(s.str());
  for (const auto& r : conf.restricted) conf.used.insert(r);
  for (const auto& [key, caps] : conf.sigma.entries()) {
    conf.used.insert(key.first.str());
    conf.used.insert(key.second.str());
  }
  return conf;
}

namespace {

bool has_caps(const CapabilityState& s, const AnnotatedThread& p, const SessionKey& k) {
  auto have = s.lookup(p.thread, k);
  return std::includes(have.begin(), have.end(), p.req.begin(), p.req.end());
}

void apply_exchange(CapabilityState& s, const AnnotatedThread& p, const SessionKey& k) {
  s.set(p.thread, k, exchange(p.req, p.off, s.lookup(p.thread, k)));
}

// Subsets of `eligible` positions satisfying q, largest first.
std::vector<std::vector<bool>> choices(const Quality& q, const std::vector<bool>& eligible) {
  std::size_t n = eligible.size();
  std::vector<std::uint32_t> masks;
  if (n > 20) return {};
  std::uint32_t allowed = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (eligible[i]) allowed |= 1u << i;
  for (std::uint32_t m = allowed;; m = (m - 1) & allowed) {
    std::vector<bool> flags(n);
    for (std::size_t i = 0; i < n; ++i) flags[i] = (m >> i) & 1u;
    if (eval_quality(q, flags)) masks.push_back(m);
    if (m == 0) break;
  }
  // Larger subsets first; equal sizes in lexicographic order of member indices.
  std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    if (__builtin_popcount(a) != __builtin_popcount(b)) return __builtin_popcount(a) > __builtin_popcount(b);
    std::uint32_t diff = a ^ b;
    return (a & diff & (~diff + 1)) != 0;
  });
  std::vector<std::vector<bool>> out;
  for (auto m : masks) {
    std::vector<bool> flags(n);
    for (std::size_t i = 0; i < n; ++i) flags[i] = (m >> i) & 1u;
    out.push_back(std::move(flags));
  }
  return out;
}

std::vector<bool> eligibility(const std::vector<AnnotatedThread>& ps, const SessionKey& k, const CapabilityState& s,
                              const AvailabilityOracle* oracle, std::size_t step) {
  std::set<Thread> cand;
  for (const auto& p : ps) cand.insert(p.thread);
  auto avail = oracle ? oracle->available(step, k, cand) : cand;
  std::vector<bool> out;
  for (const auto& p : ps) out.push_back(avail.count(p.thread) && has_caps(s, p, k));
  return out;
}

void fire_init(const Configuration& conf, const Init& init, const ChorPtr& residual, std::vector<GTransition>& out) {
  Configuration next = conf;
  Init inst = init;
  ChorPtr cont = residual;
  for (auto& s : inst.services) {
    auto fresh = fresh_name(s.thread.str(), next.used);
    next.used.insert(fresh);
    next.restricted.push_back(fresh);
    if (fresh != s.thread.str()) {
      cont = rename_thread(cont, s.thread, Thread(fresh));
      s.thread = Thread(fresh);
    }
  }
  auto key = fresh_name(inst.key.str(), next.used);
  next.used.insert(key);
  next.restricted.push_back(key);
  if (key != inst.key.str()) {
    cont = rename_session(cont, inst.key, SessionKey(key));
    inst.key = SessionKey(key);
  }
  CapabilityState actives, services;
  for (const auto& p : inst.actives) actives.set(p.thread, inst.key, p.off);
  for (const auto& p : inst.services) services.set(p.thread, inst.key, p.off);
  next.sigma = state_update(conf.sigma, state_update(actives, services));
  next.chor = cont;
  GLabel l;
  l.kind = GLabel::Kind::Init;
  l.act = inst;
  for (const auto& p : participants(inst)) l.chosen.push_back(p.thread);
  out.push_back({std::move(l), std::move(next)});
}

void fire_bcast(const Configuration& conf, const Bcast& b, const ChorPtr& residual, const AvailabilityOracle* oracle,
                std::size_t step, std::vector<GTransition>& out) {
  if (!has_caps(conf.sigma, b.sender, b.key)) return;
  std::vector<AnnotatedThread> recv;
  for (const auto& r : b.receivers) recv.push_back(r.at);
  auto v = eval(b.expr);
  for (const auto& flags : choices(b.q, eligibility(recv, b.key, conf.sigma, oracle, step))) {
    Configuration next = conf;
    GLabel l;
    l.kind = GLabel::Kind::Bcast;
    Bcast inst = b;
    inst.expr = ex::of_opt(v);
    l.act = inst;
    l.value = v;
    Subst theta;
    apply_exchange(next.sigma, b.sender, b.key);
    for (std::size_t i = 0; i < recv.size(); ++i) {
      theta[{b.receivers[i].var, recv[i].thread}] = flags[i] ? v : std::nullopt;
      if (flags[i]) {
        apply_exchange(next.sigma, recv[i], b.key);
        l.chosen.push_back(recv[i].thread);
      } else {
        l.absent.push_back(recv[i].thread);
      }
    }
    next.chor = substitute(residual, theta);
    out.push_back({std::move(l), std::move(next)});
  }
}

void fire_select(const Configuration& conf, const Select& s, const ChorPtr& residual, const AvailabilityOracle* oracle,
                 std::size_t step, std::vector<GTransition>& out) {
  if (!has_caps(conf.sigma, s.sender, s.key)) return;
  for (const auto& flags : choices(s.q, eligibility(s.receivers, s.key, conf.sigma, oracle, step))) {
    Configuration next = conf;
    GLabel l;
    l.kind = GLabel::Kind::Select;
    l.act = s;
    apply_exchange(next.sigma, s.sender, s.key);
    for (std::size_t i = 0; i < s.receivers.size(); ++i) {
      if (flags[i]) {
        apply_exchange(next.sigma, s.receivers[i], s.key);
        l.chosen.push_back(s.receivers[i].thread);
      } else {
        l.absent.push_back(s.receivers[i].thread);
      }
    }
    next.chor = residual;
    out.push_back({std::move(l), std::move(next)});
  }
}

void fire_reduce(const Configuration& conf, const Reduce& r, const ChorPtr& residual, const AvailabilityOracle* oracle,
                 std::size_t step, std::vector<GTransition>& out) {
  if (!has_caps(conf.sigma, r.receiver, r.key)) return;
  std::vector<AnnotatedThread> send;
  std::vector<OptValue> vals;
  for (const auto& s : r.senders) {
    send.push_back(s.at);
    vals.push_back(eval(s.expr));
  }
  for (const auto& flags : choices(r.q, eligibility(send, r.key, conf.sigma, oracle, step))) {
    Configuration next = conf;
    GLabel l;
    l.kind = GLabel::Kind::Reduce;
    Reduce inst = r;
    for (std::size_t i = 0; i < send.size(); ++i) inst.senders[i].expr = ex::of_opt(vals[i]);
    l.act = inst;
    for (std::size_t i = 0; i < send.size(); ++i) {
      l.contributions.push_back(flags[i] ? vals[i] : std::nullopt);
      if (flags[i]) {
        apply_exchange(next.sigma, send[i], r.key);
        l.chosen.push_back(send[i].thread);
      } else {
        l.absent.push_back(send[i].thread);
      }
    }
    apply_exchange(next.sigma, r.receiver, r.key);
    l.value = apply_agg(r.op, l.contributions);
    next.chor = substitute(residual, Subst{{{r.var, r.receiver.thread}, l.value}});
    out.push_back({std::move(l), std::move(next)});
  }
}

}  // namespace

std::vector<GTransition> enabled(const Configuration& conf, const AvailabilityOracle* oracle, std::size_t step_index) {
  std::vector<GTransition> out;
  for (const auto& h : chor_heads(conf.chor)) {
    if (h.tau) {
      GLabel l;
      l.kind = GLabel::Kind::Tau;
      l.tau_at = h.at;
      l.tau_then = eval_guard(h.guard);
      Configuration next = conf;
      next.chor = l.tau_then ? h.then_residual : h.else_residual;
      out.push_back({std::move(l), std::move(next)});
      continue;
    }
    std::visit(
        [&](const auto& a) {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, Init>) fire_init(conf, a, h.residual, out);
          else if constexpr (std::is_same_v<A, Bcast>) fire_bcast(conf, a, h.residual, oracle, step_index, out);
          else if constexpr (std::is_same_v<A, Reduce>) fire_reduce(conf, a, h.residual, oracle, step_index, out);
          else fire_select(conf, a, h.residual, oracle, step_index, out);
        },
        h.act);
  }
  return out;
}

GTransition step(const Configuration& conf, std::size_t choice) {
  auto ts = enabled(conf);
  if (ts.empty()) throw Stuck("no transition from " + pretty_print(conf.chor));
  if (choice >= ts.size()) throw std::out_of_range("transition index out of range");
  return ts[choice];
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Completed: return "completed";
    case Verdict::Stuck: return "stuck";
    case Verdict::Budget: return "budget";
  }
  return "?";
}

GlobalTrace run(const Configuration& conf, const AvailabilityOracle& oracle, const Policy& policy,
                std::size_t max_steps) {
  GlobalTrace tr;
  tr.final = conf;
  std::mt19937_64 rng(policy.seed);
  for (std::size_t i = 0;; ++i) {
    if (tr.final.chor->is_end()) {
      tr.verdict = Verdict::Completed;
      return tr;
    }
    if (i >= max_steps) {
      tr.verdict = Verdict::Budget;
      return tr;
    }
    auto ts = enabled(tr.final, &oracle, i);
    if (ts.empty()) {
      tr.verdict = Verdict::Stuck;
      return tr;
    }
    std::size_t pick = policy.kind == PolicyKind::Random ? static_cast<std::size_t>(rng() % ts.size()) : 0;
    tr.labels.push_back(ts[pick].label);
    tr.final = std::move(ts[pick].next);
  }
}

// ---------------------------------------------------------------- swap equivalence

namespace {

bool swap_eq(const ChorPtr& a, const ChorPtr& b, std::map<std::pair<std::string, std::string>, bool>& memo) {
  if (chor_equal(a, b)) return true;
  if (a->is_end() || b->is_end()) return false;
  auto key = std::make_pair(pretty_print(a), pretty_print(b));
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  memo[key] = false;
  auto ha = chor_heads(a);
  auto hb = chor_heads(b);
  auto covered = [&](const std::vector<Head>& xs, const std::vector<Head>& ys, bool flip) {
    for (const auto& x : xs) {
      bool ok = false;
      for (const auto& y : ys) {
        if (!same_head(x, y)) continue;
        auto eq = [&](const ChorPtr& p, const ChorPtr& q) { return flip ? swap_eq(q, p, memo) : swap_eq(p, q, memo); };
        if (x.tau ? (eq(x.then_residual, y.then_residual) && eq(x.else_residual, y.else_residual))
                  : eq(x.residual, y.residual)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  bool r = covered(ha, hb, false) && covered(hb, ha, true);
  memo[key] = r;
  return r;
}

}  // namespace

bool swap_equal(const ChorPtr& a, const ChorPtr& b) {
  std::map<std::pair<std::string, std::string>, bool> memo;
  return swap_eq(a, b, memo);
}

std::vector<ChorPtr> swap_neighbors(const ChorPtr& c) {
  std::vector<ChorPtr> out;
  if (auto* s = std::get_if<Chor::Seq>(&c->node)) {
    if (auto* s2 = std::get_if<Chor::Seq>(&s->next->node)) {
      Head h;
      h.act = s2->act;
      if (can_swap(s->act, h)) out.push_back(ch::seq(s2->act, ch::seq(s->act, s2->next)));
    }
    if (auto* i = std::get_if<Chor::If>(&s->next->node)) {
      if (!interaction_threads(s->act).count(i->at))
        out.push_back(ch::if_(i->guard, i->at, ch::seq(s->act, i->then_branch), ch::seq(s->act, i->else_branch)));
    }
    for (const auto& n : swap_neighbors(s->next)) out.push_back(ch::seq(s->act, n));
  } else if (auto* i = std::get_if<Chor::If>(&c->node)) {
    auto* a = std::get_if<Chor::Seq>(&i->then_branch->node);
    auto* b = std::get_if<Chor::Seq>(&i->else_branch->node);
    if (a && b && interaction_equal(a->act, b->act) && !interaction_threads(a->act).count(i->at))
      out.push_back(ch::seq(a->act, ch::if_(i->guard, i->at, a->next, b->next)));
    auto* ia = std::get_if<Chor::If>(&i->then_branch->node);
    auto* ib = std::get_if<Chor::If>(&i->else_branch->node);
    if (ia && ib && ia->at == ib->at && ia->at != i->at && expr_equal(ia->guard, ib->guard))
      out.push_back(ch::if_(ia->guard, ia->at, ch::if_(i->guard, i->at, ia->then_branch, ib->then_branch),
                            ch::if_(i->guard, i->at, ia->else_branch, ib->else_branch)));
    for (const auto& n : swap_neighbors(i->then_branch)) out.push_back(ch::if_(i->guard, i->at, n, i->else_branch));
    for (const auto& n : swap_neighbors(i->else_branch)) out.push_back(ch::if_(i->guard, i->at, i->then_branch, n));
  } else if (auto* n = std::get_if<Chor::New>(&c->node)) {
    for (const auto& m : swap_neighbors(n->body)) out.push_back(ch::new_(n->name, m));
  }
  return out;
}

// ---------------------------------------------------------------- JSON

nlohmann::json value_json(const OptValue& v) {
  if (!v) return nullptr;
  return std::visit(
      [](const auto& x) -> nlohmann::json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Date>) return nlohmann::json{{"date", x.iso}};
        else return x;
      },
      v->repr());
}

nlohmann::json glabel_json(const GLabel& l, std::size_t step) {
  nlohmann::json j;
  j["step"] = step;
  j["kind"] = label_kind(l);
  auto names = [](const std::vector<Thread>& ts) {
    auto a = nlohmann::json::array();
    for (const auto& t : ts) a.push_back(t.str());
    return a;
  };
  if (l.kind == GLabel::Kind::Tau) {
    j["session"] = nullptr;
    j["sender"] = l.tau_at.str();
    j["chosen"] = nlohmann::json::array();
    j["absent"] = nlohmann::json::array();
    j["value"] = l.tau_then;
    j["label"] = l.tau_then ? "then" : "else";
    return j;
  }
  j["session"] = l.session().str();
  j["chosen"] = names(l.chosen);
  j["absent"] = names(l.absent);
  j["value"] = value_json(l.value);
  j["label"] = nullptr;
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, Init>) {
          j["sender"] = a.actives.front().thread.str();
          j["service"] = a.service.str();
        } else if constexpr (std::is_same_v<A, Bcast>) {
          j["sender"] = a.sender.thread.str();
        } else if constexpr (std::is_same_v<A, Reduce>) {
          j["sender"] = nullptr;
          j["receiver"] = a.receiver.thread.str();
          auto slots = nlohmann::json::array();
          for (const auto& c : l.contributions) slots.push_back(value_json(c));
          j["contributions"] = slots;
        } else {
          j["sender"] = a.sender.thread.str();
          j["label"] = a.label.str();
        }
      },
      *l.act);
  return j;
}

}  // namespace gcq
