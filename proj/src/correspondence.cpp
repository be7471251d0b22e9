#include "gcq/correspondence.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gcq/parser.hpp"

namespace gcq {

namespace {

std::vector<Role> roles_of(const std::vector<AnnotatedThread>& ps) {
  std::vector<Role> out;
  for (const auto& p : ps) out.push_back(p.role);
  return out;
}

ELabel make(ELabel::Kind k, const SessionKey& key) {
  ELabel l;
  l.kind = k;
  l.key = key;
  return l;
}

ELabel start_label(const Init& a) {
  auto l = make(ELabel::Kind::Start, a.key);
  l.service = a.service;
  l.actives = roles_of(a.actives);
  l.services = roles_of(a.services);
  return l;
}

// Labels of a broadcast or selection delivered to the receivers in `in_j`.
std::vector<ELabel> out_labels(const SessionKey& k, const Quality& q, const Role& from, const std::vector<Role>& to,
                               const std::vector<bool>& in_j, bool select, const OptValue& v, const Label& lab) {
  std::vector<ELabel> out;
  auto up = make(ELabel::Kind::EnqUp, k);
  up.one = from;
  up.many = to;
  out.push_back(up);
  for (std::size_t i = 0; i < to.size(); ++i) {
    if (!in_j[i]) continue;
    auto in = make(select ? ELabel::Kind::SelIn : ELabel::Kind::BcIn, k);
    in.one = from;
    in.many = {to[i]};
    if (select) in.label = lab;
    else in.value = v;
    out.push_back(in);
  }
  auto rel = make(select ? ELabel::Kind::SelOut : ELabel::Kind::BcOut, k);
  rel.one = from;
  rel.many = to;
  rel.q = q;
  if (select) rel.label = lab;
  else rel.value = v;
  out.push_back(rel);
  return out;
}

std::vector<ELabel> reduce_labels(const Reduce& r, const std::vector<bool>& in_j, const std::vector<OptValue>& vals,
                                  const OptValue& result) {
  std::vector<ELabel> out;
  std::vector<Role> from;
  for (const auto& s : r.senders) from.push_back(s.at.role);
  auto down = make(ELabel::Kind::EnqDown, r.key);
  down.one = r.receiver.role;
  down.many = from;
  out.push_back(down);
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!in_j[i]) continue;
    auto o = make(ELabel::Kind::RdOut, r.key);
    o.one = r.receiver.role;
    o.many = {from[i]};
    o.value = vals[i];
    out.push_back(o);
  }
  auto in = make(ELabel::Kind::RdIn, r.key);
  in.one = r.receiver.role;
  in.many = from;
  in.q = r.q;
  in.value = result;
  out.push_back(in);
  return out;
}

std::vector<bool> membership(const std::vector<Thread>& ts, const std::vector<Thread>& j) {
  std::vector<bool> out;
  for (const auto& t : ts) out.push_back(std::find(j.begin(), j.end(), t) != j.end());
  return out;
}

std::vector<Thread> threads_of(const std::vector<AnnotatedThread>& ps) {
  std::vector<Thread> out;
  for (const auto& p : ps) out.push_back(p.thread);
  return out;
}

// Candidate endpoint realisations of a global label, one per admissible J.
std::vector<std::pair<std::vector<Thread>, std::vector<ELabel>>> candidates(const GLabel& l) {
  std::vector<std::pair<std::vector<Thread>, std::vector<ELabel>>> out;
  if (l.kind == GLabel::Kind::Tau || !l.act) {
    out.push_back({{}, {ELabel{}}});
    return out;
  }
  if (auto* a = std::get_if<Init>(&*l.act)) {
    out.push_back({{}, {start_label(*a)}});
    return out;
  }
  auto subsets = [](std::size_t n, const Quality& q) {
    std::vector<std::vector<bool>> res;
    for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
      std::vector<bool> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = (m >> i) & 1U;
      if (eval_quality(q, f)) res.push_back(f);
    }
    return res;
  };
  auto pick = [](const std::vector<Thread>& ts, const std::vector<bool>& f) {
    std::vector<Thread> j;
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (f[i]) j.push_back(ts[i]);
    return j;
  };
  if (auto* b = std::get_if<Bcast>(&*l.act)) {
    std::vector<Thread> ts;
    std::vector<Role> to;
    for (const auto& r : b->receivers) {
      ts.push_back(r.at.thread);
      to.push_back(r.at.role);
    }
    auto v = eval(b->expr);
    for (const auto& f : subsets(ts.size(), b->q))
      out.push_back({pick(ts, f), out_labels(b->key, b->q, b->sender.role, to, f, false, v, Label())});
  } else if (auto* s = std::get_if<Select>(&*l.act)) {
    auto ts = threads_of(s->receivers);
    for (const auto& f : subsets(ts.size(), s->q))
      out.push_back(
          {pick(ts, f), out_labels(s->key, s->q, s->sender.role, roles_of(s->receivers), f, true, {}, s->label)});
  } else if (auto* r = std::get_if<Reduce>(&*l.act)) {
    std::vector<Thread> ts;
    std::vector<OptValue> vals;
    for (const auto& x : r->senders) {
      ts.push_back(x.at.thread);
      vals.push_back(eval(x.expr));
    }
    for (const auto& f : subsets(ts.size(), r->q)) {
      std::vector<OptValue> slots;
      for (std::size_t i = 0; i < f.size(); ++i) slots.push_back(f[i] ? vals[i] : std::nullopt);
      out.push_back({pick(ts, f), reduce_labels(*r, f, vals, apply_agg(r->op, slots))});
    }
  }
  return out;
}

}  // namespace

std::vector<ELabel> expected_labels(const GLabel& l) {
  if (l.kind == GLabel::Kind::Tau || !l.act) return {ELabel{}};
  if (auto* a = std::get_if<Init>(&*l.act)) return {start_label(*a)};
  if (auto* b = std::get_if<Bcast>(&*l.act)) {
    std::vector<Thread> ts;
    std::vector<Role> to;
    for (const auto& r : b->receivers) {
      ts.push_back(r.at.thread);
      to.push_back(r.at.role);
    }
    return out_labels(b->key, b->q, b->sender.role, to, membership(ts, l.chosen), false, l.value, Label());
  }
  if (auto* s = std::get_if<Select>(&*l.act))
    return out_labels(s->key, s->q, s->sender.role, roles_of(s->receivers),
                      membership(threads_of(s->receivers), l.chosen), true, {}, s->label);
  const auto& r = std::get<Reduce>(*l.act);
  std::vector<Thread> ts;
  for (const auto& x : r.senders) ts.push_back(x.at.thread);
  auto vals = l.contributions;
  vals.resize(ts.size());
  return reduce_labels(r, membership(ts, l.chosen), vals, l.value);
}

std::optional<LabelWitness> implements(const std::vector<GLabel>& globals, const std::vector<ELabel>& endpoints) {
  std::vector<bool> used(endpoints.size(), false);
  LabelWitness w;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == globals.size()) return std::all_of(used.begin(), used.end(), [](bool b) { return b; });
    for (const auto& [j, labels] : candidates(globals[i])) {
      std::vector<std::size_t> taken;
      bool ok = true;
      for (const auto& want : labels) {
        bool found = false;
        for (std::size_t e = 0; e < endpoints.size(); ++e) {
          if (used[e] || !elabel_equal(endpoints[e], want)) continue;
          used[e] = true;
          taken.push_back(e);
          found = true;
          break;
        }
        if (!found) {
          ok = false;
          break;
        }
      }
      if (ok) {
        w.groups.push_back(taken);
        w.subsets.push_back(j);
        if (go(i + 1)) return true;
        w.groups.pop_back();
        w.subsets.pop_back();
      }
      for (auto e : taken) used[e] = false;
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return w;
}

// ---------------------------------------------------------------- cosimulation

const char* cosim_verdict_name(CosimVerdict v) {
  switch (v) {
    case CosimVerdict::Pass: return "pass";
    case CosimVerdict::CounterexampleFound: return "counterexample";
    case CosimVerdict::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

namespace {

std::string conf_key(const Configuration& c) { return pretty_print(c.chor) + "|" + c.sigma.to_string(); }

struct Realisation {
  Network net;
  std::vector<ELabel> labels;
};

// Searches for an endpoint run from `n` whose labels are exactly `want` (as a
// multiset) and whose final network is pruned by `target`.
std::optional<Realisation> realise(const Network& n, std::vector<ELabel> want, const Network& target,
                                   std::size_t& steps) {
  std::set<std::string> failed;
  std::vector<ELabel> path;
  std::function<std::optional<Network>(const Network&, std::vector<ELabel>&)> go =
      [&](const Network& cur, std::vector<ELabel>& rest) -> std::optional<Network> {
    if (rest.empty()) {
      if (prunes_structural(target, cur)) return cur;
      return std::nullopt;
    }
    std::string key = net_canonical(cur) + "#";
    for (const auto& l : rest) key += print_elabel(l) + ";";
    if (failed.count(key)) return std::nullopt;
    for (const auto& t : net_enabled(cur)) {
      auto it = std::find_if(rest.begin(), rest.end(), [&](const ELabel& l) { return elabel_equal(l, t.label); });
      if (it == rest.end()) continue;
      ++steps;
      ELabel kept = *it;
      rest.erase(it);
      path.push_back(t.label);
      if (auto r = go(t.next, rest)) return r;
      path.pop_back();
      rest.push_back(kept);
    }
    failed.insert(key);
    return std::nullopt;
  };
  auto r = go(n, want);
  if (!r) return std::nullopt;
  return Realisation{*r, path};
}

struct PairState {
  Configuration conf;
  Network net;
  std::vector<GLabel> gtrace;
  std::vector<ELabel> etrace;
  std::size_t depth = 0;
};

}  // namespace

CosimReport cosimulate(const Configuration& conf, const std::optional<Network>& network, const CosimOptions& opts) {
  CosimReport rep;
  Network n0;
  try {
    n0 = network ? *network : epp(conf);
  } catch (const std::exception& e) {
    rep.verdict = CosimVerdict::CounterexampleFound;
    rep.soundness_ok = false;
    rep.counterexamples.push_back({"soundness", {}, {}, std::string("projection failed: ") + e.what()});
    return rep;
  }
  std::deque<PairState> work{{conf, n0, {}, {}, 0}};
  std::set<std::string> seen{conf_key(conf) + "||" + net_canonical(n0)};
  bool budget = false;

  auto push = [&](const PairState& from, const std::vector<GLabel>& gl, const Configuration& conf,
                  const Realisation& r) {
    PairState s{conf, r.net, from.gtrace, from.etrace, from.depth + gl.size()};
    s.gtrace.insert(s.gtrace.end(), gl.begin(), gl.end());
    s.etrace.insert(s.etrace.end(), r.labels.begin(), r.labels.end());
    if (!seen.insert(conf_key(s.conf) + "||" + net_canonical(s.net)).second) return;
    if (seen.size() > opts.max_states) {
      budget = true;
      return;
    }
    work.push_back(std::move(s));
  };

  while (!work.empty() && !budget && rep.soundness_ok && rep.completeness_ok) {
    PairState cur = std::move(work.front());
    work.pop_front();
    ++rep.states;
    if (cur.depth >= opts.bound) continue;
    auto gts = enabled(cur.conf);
    rep.global_steps += gts.size();
    std::vector<std::optional<Network>> targets;
    for (const auto& g : gts) {
      try {
        targets.push_back(epp(g.next));
      } catch (const std::exception&) {
        targets.push_back(std::nullopt);
      }
    }

    // Soundness: every global step is matched by endpoint steps.
    for (std::size_t i = 0; i < gts.size() && rep.soundness_ok; ++i) {
      std::optional<Realisation> r;
      if (targets[i]) r = realise(cur.net, expected_labels(gts[i].label), *targets[i], rep.endpoint_steps);
      if (!r) {
        rep.soundness_ok = false;
        auto gt = cur.gtrace;
        gt.push_back(gts[i].label);
        rep.counterexamples.push_back({"soundness", gt, cur.etrace,
                                       "no endpoint run implements " + print_glabel(gts[i].label) +
                                           (targets[i] ? "" : " (projection of the successor is undefined)")});
        break;
      }
      push(cur, {gts[i].label}, gts[i].next, *r);
    }

    // Completeness: every endpoint step extends to a run matching a short
    // sequence of global steps, the last of which contains the endpoint step.
    for (const auto& et : net_enabled(cur.net)) {
      ++rep.endpoint_steps;
      struct GNode {
        Configuration conf;
        std::vector<GLabel> labels;
        std::vector<ELabel> want;
      };
      std::deque<GNode> gwork{{cur.conf, {}, {}}};
      std::set<std::string> gseen{conf_key(cur.conf)};
      bool matched = false;
      while (!gwork.empty() && !matched) {
        GNode g = std::move(gwork.front());
        gwork.pop_front();
        auto steps = g.labels.empty() ? gts : enabled(g.conf);
        for (std::size_t i = 0; i < steps.size() && !matched; ++i) {
          auto want = g.want;
          auto add = expected_labels(steps[i].label);
          want.insert(want.end(), add.begin(), add.end());
          auto labels = g.labels;
          labels.push_back(steps[i].label);
          auto it = std::find_if(add.begin(), add.end(), [&](const ELabel& l) { return elabel_equal(l, et.label); });
          if (it != add.end()) {
            std::optional<Network> target;
            if (g.labels.empty()) target = targets[i];
            else {
              try {
                target = epp(steps[i].next);
              } catch (const std::exception&) {
              }
            }
            if (target) {
              auto rest = want;
              rest.erase(std::find_if(rest.begin(), rest.end(),
                                      [&](const ELabel& l) { return elabel_equal(l, et.label); }));
              if (auto r = realise(et.next, rest, *target, rep.endpoint_steps)) {
                matched = true;
                r->labels.insert(r->labels.begin(), et.label);
                push(cur, labels, steps[i].next, *r);
                break;
              }
            }
          }
          if (labels.size() < opts.completion_depth && gseen.insert(conf_key(steps[i].next)).second)
            gwork.push_back({steps[i].next, std::move(labels), std::move(want)});
        }
      }
      if (!matched) {
        rep.completeness_ok = false;
        auto e = cur.etrace;
        e.push_back(et.label);
        rep.counterexamples.push_back({"completeness", cur.gtrace, e,
                                       "endpoint step " + print_elabel(et.label) +
                                           " has no completion matching a global run"});
        break;
      }
    }
  }
  if (!rep.soundness_ok || !rep.completeness_ok) rep.verdict = CosimVerdict::CounterexampleFound;
  else if (budget) rep.verdict = CosimVerdict::BudgetExceeded;
  return rep;
}

CosimReport cosimulate(const ChorPtr& c, const CosimOptions& opts) {
  return cosimulate(make_configuration(c), std::nullopt, opts);
}

// ---------------------------------------------------------------- availability

const char* availability_verdict_name(AvailabilityVerdict v) {
  switch (v) {
    case AvailabilityVerdict::Pass: return "pass";
    case AvailabilityVerdict::StuckNetworkFound: return "stuck-network";
    case AvailabilityVerdict::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

AvailabilityReport availability_check(const Network& n, const std::vector<OraclePtr>& family, std::size_t bound,
                                      std::size_t max_states) {
  AvailabilityReport rep;
  struct Node {
    Network net;
    std::size_t step;
    std::vector<ELabel> trace;
  };
  for (const auto& o : family) {
    ++rep.oracles;
    auto h = o->horizon();
    std::set<std::string> seen;
    std::deque<Node> work{{n, 0, {}}};
    while (!work.empty()) {
      Node cur = std::move(work.front());
      work.pop_front();
      auto step_key = h ? std::min(cur.step, *h + 1) : cur.step;
      if (!seen.insert(net_canonical(cur.net, true) + "#" + std::to_string(step_key)).second) continue;
      if (++rep.states > max_states) {
        rep.verdict = AvailabilityVerdict::BudgetExceeded;
        return rep;
      }
      auto ts = net_enabled(cur.net, o.get(), cur.step);
      if (ts.empty() && !net_completed(cur.net) && net_enabled(cur.net).empty()) {
        rep.verdict = AvailabilityVerdict::StuckNetworkFound;
        rep.oracle = o->describe();
        rep.trace = cur.trace;
        rep.stuck_network = print_network(net_gc(cur.net));
        return rep;
      }
      if (cur.step >= bound) continue;
      for (auto& t : ts) {
        Node next{std::move(t.next), cur.step + 1, cur.trace};
        next.trace.push_back(t.label);
        work.push_back(std::move(next));
      }
    }
  }
  return rep;
}

AvailabilityReport availability_check(const ChorPtr& c, const std::vector<OraclePtr>& family, std::size_t bound,
                                      std::size_t max_states) {
  return availability_check(epp(c), family, bound, max_states);
}

// ---------------------------------------------------------------- reports

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string junit(const std::string& suite, const std::vector<std::pair<std::string, std::string>>& cases,
                  const std::string& skipped) {
  std::size_t failures = 0;
  for (const auto& c : cases) failures += c.second.empty() ? 0 : 1;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<testsuite name=\"" << xml_escape(suite) << "\" tests=\"" << cases.size() << "\" failures=\"" << failures
     << "\" skipped=\"" << (skipped.empty() ? 0 : cases.size()) << "\">\n";
  for (const auto& [name, failure] : cases) {
    os << "  <testcase classname=\"" << xml_escape(suite) << "\" name=\"" << xml_escape(name) << "\"";
    if (failure.empty() && skipped.empty()) {
      os << "/>\n";
      continue;
    }
    os << ">\n";
    if (!failure.empty()) os << "    <failure message=\"" << xml_escape(failure) << "\"/>\n";
    else os << "    <skipped message=\"" << xml_escape(skipped) << "\"/>\n";
    os << "  </testcase>\n";
  }
  os << "</testsuite>\n";
  return os.str();
}

std::string failure_of(const CosimReport& r, const std::string& dir) {
  for (const auto& c : r.counterexamples)
    if (c.direction == dir) return c.message;
  return "";
}

}  // namespace

nlohmann::json cosim_json(const CosimReport& r) {
  nlohmann::json j;
  j["verdict"] = cosim_verdict_name(r.verdict);
  j["ok"] = r.verdict == CosimVerdict::Pass;
  j["soundness"] = r.soundness_ok;
  j["completeness"] = r.completeness_ok;
  j["states"] = r.states;
  j["counterexamples"] = nlohmann::json::array();
  for (const auto& c : r.counterexamples) {
    nlohmann::json x;
    x["direction"] = c.direction;
    x["message"] = c.message;
    x["global"] = nlohmann::json::array();
    for (std::size_t i = 0; i < c.global_trace.size(); ++i) x["global"].push_back(glabel_json(c.global_trace[i], i));
    x["endpoint"] = nlohmann::json::array();
    for (std::size_t i = 0; i < c.endpoint_trace.size(); ++i)
      x["endpoint"].push_back(elabel_json(c.endpoint_trace[i], i));
    j["counterexamples"].push_back(x);
  }
  return j;
}

std::string cosim_junit(const CosimReport& r, const std::string& name) {
  std::string skipped = r.verdict == CosimVerdict::BudgetExceeded ? "state budget exceeded" : "";
  return junit(name, {{"soundness", failure_of(r, "soundness")}, {"completeness", failure_of(r, "completeness")}},
               skipped);
}

nlohmann::json availability_json(const AvailabilityReport& r) {
  nlohmann::json j;
  j["verdict"] = availability_verdict_name(r.verdict);
  j["ok"] = r.verdict == AvailabilityVerdict::Pass;
  j["states"] = r.states;
  j["oracles"] = r.oracles;
  if (r.verdict == AvailabilityVerdict::StuckNetworkFound) {
    j["oracle"] = r.oracle;
    j["trace"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.trace.size(); ++i) j["trace"].push_back(elabel_json(r.trace[i], i));
    j["network"] = r.stuck_network;
  }
  return j;
}

std::string availability_junit(const AvailabilityReport& r, const std::string& name) {
  std::string failure =
      r.verdict == AvailabilityVerdict::StuckNetworkFound ? "stuck network under " + r.oracle : "";
  std::string skipped = r.verdict == AvailabilityVerdict::BudgetExceeded ? "state budget exceeded" : "";
  return junit(name, {{"availability", failure}}, skipped);
}

}  // namespace gcq
