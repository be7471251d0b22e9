#include "generator.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gcqtest {

namespace {

struct Member {
  Thread thread;
  Role role;
  CapSet cur;
  std::vector<VarName> vars;
};

class Gen {
 public:
  Gen(std::mt19937_64& rng, const GenOptions& o) : rng_(rng), opts_(o) {}

  Program run() {
    int total = 2 + pick(opts_.max_threads - 1);
    int services = pick(3);
    if (services > total - 1) services = total - 1;
    Init init;
    init.service = ServiceName("svc");
    init.key = SessionKey("k");
    std::vector<Member> ms;
    ServiceDecl decl;
    decl.name = init.service;
    decl.has_split = true;
    for (int i = 0; i < total; ++i) {
      bool svc = i >= total - services;
      Member m{Thread(svc ? "s" + std::to_string(i) : "t" + std::to_string(i)), Role("R" + std::to_string(i)),
               fresh_cap(i), {}};
      AnnotatedThread a{m.thread, m.role, {}, m.cur};
      (svc ? init.services : init.actives).push_back(a);
      (svc ? decl.services : decl.actives).push_back(m.role);
      ms.push_back(std::move(m));
    }
    auto [body, g] = body_of(opts_.max_interactions - 1, ms);
    decl.type = g;
    Program p;
    p.services.push_back(decl);
    p.body = ch::seq(init, body);
    return p;
  }

 private:
  int pick(int n) { return n <= 0 ? 0 : static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  bool coin(int pct) { return pick(100) < pct; }

  CapSet fresh_cap(int who) { return {CapAtom("C" + std::to_string(who) + "_" + std::to_string(cap_counter_++))}; }

  int index_of(const std::vector<Member>& ms, const Thread& t) {
    for (std::size_t i = 0; i < ms.size(); ++i)
      if (ms[i].thread == t) return static_cast<int>(i);
    return -1;
  }

  // Advances a participant; with `keep` its capability is left unchanged.
  AnnotatedThread step(std::vector<Member>& ms, int i, bool keep) {
    AnnotatedThread a{ms[i].thread, ms[i].role, ms[i].cur, ms[i].cur};
    if (!keep) {
      a.off = fresh_cap(i);
      ms[i].cur = a.off;
    }
    return a;
  }

  Quality quality(std::size_t n) {
    if (!opts_.allow_partial || coin(50)) return Quality::all();
    if (coin(50)) return Quality::any();
    unsigned m = 1 + static_cast<unsigned>(pick(static_cast<int>(n)));
    return Quality::ratio(m, static_cast<unsigned>(n));
  }

  ExprPtr payload(const Member& m) {
    if (!m.vars.empty() && coin(50)) {
      auto v = m.vars[static_cast<std::size_t>(pick(static_cast<int>(m.vars.size())))];
      return ex::binary(BinOp::Add, ex::var(v), ex::lit(Value(pick(5))));
    }
    return ex::lit(Value(pick(10) - 3));
  }

  std::vector<int> others_subset(int n, int self, bool all) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (i != self && (all || coin(60))) out.push_back(i);
    if (out.empty()) out.push_back(self == 0 ? 1 : 0);
    return out;
  }

  std::pair<ChorPtr, GTypePtr> body_of(int budget, std::vector<Member> ms) {
    if (budget <= 0 || (coin(12) && budget < opts_.max_interactions - 1)) return {ch::end(), gt::end()};
    int n = static_cast<int>(ms.size());
    int kind = pick(100);
    if (opts_.allow_if && budget >= 2 && kind >= 80) return if_of(budget, ms);
    if (kind < 40) {
      int s = pick(n);
      auto rs = others_subset(n, s, false);
      Bcast b;
      b.key = SessionKey("k");
      b.q = quality(rs.size());
      b.expr = payload(ms[s]);
      b.sender = step(ms, s, false);
      std::vector<Role> to;
      for (int r : rs) {
        VarName v("x" + std::to_string(var_counter_++));
        b.receivers.push_back({step(ms, r, !b.q.is_all()), v});
        ms[r].vars.push_back(v);
        to.push_back(ms[r].role);
      }
      auto [c, g] = body_of(budget - 1, ms);
      return {ch::seq(b, c), gt::bcast(ms[s].role, to, Sort::Int, g)};
    }
    if (kind < 70) {
      int r = pick(n);
      auto ss = others_subset(n, r, false);
      Reduce red;
      red.key = SessionKey("k");
      red.q = quality(ss.size());
      static const AggOp ops[] = {AggOp::Avg, AggOp::Max, AggOp::Min, AggOp::Sum, AggOp::Id};
      red.op = ops[pick(5)];
      std::vector<Role> from;
      for (int s : ss) {
        auto e = payload(ms[s]);
        red.senders.push_back({step(ms, s, !red.q.is_all()), e});
        from.push_back(ms[s].role);
      }
      red.receiver = step(ms, r, false);
      red.var = VarName("x" + std::to_string(var_counter_++));
      ms[r].vars.push_back(red.var);
      auto [c, g] = body_of(budget - 1, ms);
      return {ch::seq(red, c), gt::red(from, ms[r].role, Sort::Int, g)};
    }
    int s = pick(n);
    Label l("l" + std::to_string(label_counter_++));
    auto [sel, to] = select_of(ms, s, l);
    auto [c, g] = body_of(budget - 1, ms);
    return {ch::seq(sel, c), gt::branch(ms[s].role, to, {{l, g}})};
  }

  std::pair<Select, std::vector<Role>> select_of(std::vector<Member>& ms, int s, const Label& l) {
    Select sel;
    sel.key = SessionKey("k");
    sel.q = Quality::all();
    sel.label = l;
    sel.sender = step(ms, s, false);
    std::vector<Role> to;
    for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
      if (i == s) continue;
      sel.receivers.push_back(step(ms, i, false));
      to.push_back(ms[i].role);
    }
    return {sel, to};
  }

  std::pair<ChorPtr, GTypePtr> if_of(int budget, const std::vector<Member>& ms) {
    int p = pick(static_cast<int>(ms.size()));
    ExprPtr guard;
    if (!ms[p].vars.empty()) {
      guard = ex::binary(BinOp::Lt, ex::var(ms[p].vars.back()), ex::lit(Value(pick(6))));
    } else {
      guard = ex::lit(Value(coin(50)));
    }
    Label lt("left"), lf("right");
    auto left_ms = ms, right_ms = ms;
    auto [sl, to] = select_of(left_ms, p, lt);
    auto [sr, to2] = select_of(right_ms, p, lf);
    auto [c1, g1] = body_of(budget - 1, left_ms);
    auto [c2, g2] = body_of(budget - 1, right_ms);
    return {ch::if_(guard, ms[p].thread, ch::seq(sl, c1), ch::seq(sr, c2)),
            gt::branch(ms[p].role, to, {{lt, g1}, {lf, g2}})};
  }

  std::mt19937_64& rng_;
  GenOptions opts_;
  int cap_counter_ = 0;
  int var_counter_ = 0;
  int label_counter_ = 0;
};

}  // namespace

Program generate_program(std::mt19937_64& rng, const GenOptions& opts) { return Gen(rng, opts).run(); }

std::string read_program_file(const std::string& name) {
  std::ifstream in(std::string(GCQ_PROGRAMS_DIR) + "/" + name);
  if (!in) throw std::runtime_error("cannot open program " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gcqtest
