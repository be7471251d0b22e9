#include <cctype>

#include "gcq/epq.hpp"
#include "gcq/parser.hpp"

namespace gcq {

namespace {

std::string roles_text(const std::vector<Role>& rs) {
  std::string s;
  for (const auto& r : rs) s += (s.empty() ? "" : ", ") + r.str();
  return s;
}

// Text of one prefix, without the continuation.
std::string prefix_text(const ProcPtr& p) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        const auto q = [](const Quality& q) { return "[" + print_quality(q) + "]"; };
        if constexpr (std::is_same_v<T, Proc::End>) return "end";
        else if constexpr (std::is_same_v<T, Proc::Request>)
          return "request " + x.service.str() + "[" + roles_text(x.actives) + " ; " + roles_text(x.services) + "](" +
                 x.key.str() + ")";
        else if constexpr (std::is_same_v<T, Proc::Accept>)
          return std::string(x.replicated ? "accept! " : "accept ") + x.service.str() + "[" + x.role.str() + "](" +
                 x.key.str() + ")";
        else if constexpr (std::is_same_v<T, Proc::QOut>)
          return "out! " + x.key.str() + "[" + x.from.str() + "] -> (" + roles_text(x.to) + ") " + q(x.q) + " (" +
                 print_expr(x.expr) + ")";
        else if constexpr (std::is_same_v<T, Proc::Out>)
          return "out! " + x.key.str() + "[" + x.self.str() + "] -> " + x.to.str() + " (" + print_expr(x.expr) + ")";
        else if constexpr (std::is_same_v<T, Proc::In>)
          return "in? " + x.key.str() + "[" + x.self.str() + "] <- " + x.from.str() + " (" + x.var.str() + ")";
        else if constexpr (std::is_same_v<T, Proc::QIn>)
          return "in? " + x.key.str() + "[" + x.self.str() + "] <- (" + roles_text(x.from) + ") " + q(x.q) + " " +
                 agg_name(x.op) + " (" + x.var.str() + ")";
        else if constexpr (std::is_same_v<T, Proc::QSel>)
          return "sel! " + x.key.str() + "[" + x.from.str() + "] -> (" + roles_text(x.to) + ") " + q(x.q) + " " +
                 x.label.str();
        else if constexpr (std::is_same_v<T, Proc::WaitOut>)
          return "wait! " + x.key.str() + "[" + x.from.str() + "] -> (" + roles_text(x.to) + ")";
        else if constexpr (std::is_same_v<T, Proc::WaitIn>)
          return "wait? " + x.key.str() + "[" + x.self.str() + "] <- (" + roles_text(x.from) + ") " + agg_name(x.op) +
                 " (" + x.var.str() + ")";
        else if constexpr (std::is_same_v<T, Proc::Branch>)
          return "branch? " + x.key.str() + "[" + x.self.str() + "] <- " + x.from.str();
        else return "if (" + print_expr(x.guard) + ")";
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

void print_into(const ProcPtr& p, std::string& out, int indent, bool pretty) {
  const std::string pad = pretty ? std::string(static_cast<std::size_t>(indent) * 2, ' ') : "";
  const std::string nl = pretty ? "\n" : " ";
  out += pad + prefix_text(p);
  if (auto* b = std::get_if<Proc::Branch>(&p->node)) {
    out += " {" + nl;
    bool first = true;
    for (const auto& [l, c] : b->branches) {
      if (!first) out += "," + nl;
      first = false;
      out += (pretty ? std::string(static_cast<std::size_t>(indent + 1) * 2, ' ') : "") + l.str() + " :" + nl;
      print_into(c, out, indent + 2, pretty);
    }
    out += nl + pad + "}";
    return;
  }
  if (auto* i = std::get_if<Proc::If>(&p->node)) {
    out += " {" + nl;
    print_into(i->then_branch, out, indent + 1, pretty);
    out += nl + pad + "} else {" + nl;
    print_into(i->else_branch, out, indent + 1, pretty);
    out += nl + pad + "}";
    return;
  }
  if (auto c = cont_of(p)) {
    out += " ." + nl;
    print_into(c, out, indent, pretty);
  }
}

class EpqParser {
 public:
  explicit EpqParser(std::string_view s) : s_(s) {}

  ProcPtr proc_only() {
    auto p = proc();
    ws();
    if (pos_ != s_.size()) fail("trailing input");
    return p;
  }

  Network network() {
    Network n;
    for (;;) {
      ws();
      if (pos_ >= s_.size()) break;
      auto kw = word();
      if (kw == "restrict") {
        for (;;) {
          n.restricted.push_back(ident());
          if (!eat(",")) break;
        }
      } else if (kw == "thread" || kw == "replicated") {
        Thread t(ident());
        expect(":");
        auto p = proc();
        if ((kw == "replicated") != p->is_replicated()) fail("'replicated' entries must be 'accept!' processes");
        n.components.push_back({t, p});
      } else if (kw == "queue") {
        SessionKey k(ident());
        expect(":");
        expect("[");
        Queue q;
        ws();
        if (!peek("]")) {
          for (;;) {
            q.push_back(msg());
            if (!eat(";")) break;
          }
        }
        expect("]");
        n.queues[k] = q;
      } else {
        fail("expected 'restrict', 'thread', 'replicated' or 'queue'");
      }
      expect(";");
    }
    for (const auto& c : n.components) {
      n.used.insert(c.thread.str());
      for (const auto& x : proc_free_sessions(c.proc)) n.used.insert(x.str());
      for (const auto& x : proc_services(c.proc)) n.used.insert(x.str());
    }
    for (const auto& [k, q] : n.queues) n.used.insert(k.str());
    for (const auto& r : n.restricted) n.used.insert(r);
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw EpqSyntaxError(pos_, msg); }

  void ws() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_.substr(pos_, 2) == "//") {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool peek(std::string_view t) {
    ws();
    return s_.substr(pos_, t.size()) == t;
  }

  bool eat(std::string_view t) {
    if (!peek(t)) return false;
    pos_ += t.size();
    return true;
  }

  void expect(std::string_view t) {
    if (!eat(t)) fail("expected '" + std::string(t) + "'");
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

  std::string word() {
    ws();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (ident_char(s_[pos_]) || s_[pos_] == '!' || s_[pos_] == '?')) ++pos_;
    if (b == pos_) fail("expected a keyword");
    return std::string(s_.substr(b, pos_ - b));
  }

  std::string ident() {
    ws();
    std::size_t b = pos_;
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    }
    if (b == pos_) fail("expected a name");
    return std::string(s_.substr(b, pos_ - b));
  }

  // Contents of a parenthesised group, honouring nesting and string literals.
  std::string group() {
    expect("(");
    std::size_t b = pos_;
    int depth = 1;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '"') {
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') pos_ += s_[pos_] == '\\' ? 2 : 1;
      } else if (c == '(') {
        ++depth;
      } else if (c == ')' && --depth == 0) {
        auto inner = std::string(s_.substr(b, pos_ - b));
        ++pos_;
        return inner;
      }
      ++pos_;
    }
    fail("unbalanced parentheses");
  }

  ExprPtr expr_group() {
    std::size_t at = pos_;
    auto text = group();
    try {
      return parse_expr(text);
    } catch (const SyntaxError& e) {
      throw EpqSyntaxError(at, std::string("bad expression: ") + e.what());
    }
  }

  std::vector<Role> role_list(std::string_view close) {
    std::vector<Role> out;
    ws();
    if (peek(close)) return out;
    for (;;) {
      out.emplace_back(ident());
      if (!eat(",")) break;
    }
    return out;
  }

  std::vector<Role> paren_roles() {
    expect("(");
    auto r = role_list(")");
    expect(")");
    return r;
  }

  Quality quality() {
    expect("[");
    Quality q;
    ws();
    if (eat("all")) {
      q = Quality::all();
    } else if (eat("any")) {
      q = Quality::any();
    } else {
      std::size_t b = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (b == pos_) fail("expected a quality");
      unsigned m = static_cast<unsigned>(std::stoul(std::string(s_.substr(b, pos_ - b))));
      expect("/");
      ws();
      b = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (b == pos_) fail("expected a quality");
      q = Quality::ratio(m, static_cast<unsigned>(std::stoul(std::string(s_.substr(b, pos_ - b)))));
    }
    expect("]");
    return q;
  }

  AggOp agg() {
    auto w = ident();
    auto op = agg_from_name(w);
    if (!op) fail("unknown aggregation '" + w + "'");
    return *op;
  }

  VarName var_group() {
    expect("(");
    VarName v(ident());
    expect(")");
    return v;
  }

  ProcPtr cont() {
    expect(".");
    return proc();
  }

  // key[Role]
  std::pair<SessionKey, Role> endpoint() {
    SessionKey k(ident());
    expect("[");
    Role r(ident());
    expect("]");
    return {k, r};
  }

  ProcPtr proc() {
    auto kw = word();
    if (kw == "end") return ep::end();
    if (kw == "request") {
      Proc::Request r;
      r.service = ServiceName(ident());
      expect("[");
      r.actives = role_list(";");
      expect(";");
      r.services = role_list("]");
      expect("]");
      expect("(");
      r.key = SessionKey(ident());
      expect(")");
      if (r.actives.empty()) fail("a request needs its own role");
      r.cont = cont();
      return ep::make(r);
    }
    if (kw == "accept" || kw == "accept!") {
      Proc::Accept a;
      a.replicated = kw == "accept!";
      a.service = ServiceName(ident());
      expect("[");
      a.role = Role(ident());
      expect("]");
      expect("(");
      a.key = SessionKey(ident());
      expect(")");
      a.cont = cont();
      return ep::make(a);
    }
    if (kw == "out!") {
      auto [k, from] = endpoint();
      expect("->");
      if (peek("(")) {
        Proc::QOut o{k, from, paren_roles(), Quality::all(), nullptr, nullptr};
        o.q = quality();
        o.expr = expr_group();
        o.cont = cont();
        return ep::make(o);
      }
      Proc::Out o{k, from, Role(ident()), nullptr, nullptr};
      o.expr = expr_group();
      o.cont = cont();
      return ep::make(o);
    }
    if (kw == "in?") {
      auto [k, self] = endpoint();
      expect("<-");
      if (peek("(")) {
        Proc::QIn i{k, paren_roles(), self, Quality::all(), AggOp::Id, VarName(), nullptr};
        i.q = quality();
        i.op = agg();
        i.var = var_group();
        i.cont = cont();
        return ep::make(i);
      }
      Proc::In i{k, self, Role(ident()), VarName(), nullptr};
      i.var = var_group();
      i.cont = cont();
      return ep::make(i);
    }
    if (kw == "sel!") {
      auto [k, from] = endpoint();
      expect("->");
      Proc::QSel s{k, from, paren_roles(), Quality::all(), Label(), nullptr};
      s.q = quality();
      s.label = Label(ident());
      s.cont = cont();
      return ep::make(s);
    }
    if (kw == "branch?") {
      auto [k, self] = endpoint();
      expect("<-");
      Proc::Branch b{k, self, Role(ident()), {}};
      expect("{");
      for (;;) {
        Label l(ident());
        expect(":");
        if (b.branches.count(l)) fail("duplicate branch label '" + l.str() + "'");
        b.branches[l] = proc();
        if (!eat(",")) break;
      }
      expect("}");
      return ep::make(b);
    }
    if (kw == "wait!") {
      auto [k, from] = endpoint();
      expect("->");
      Proc::WaitOut w{k, from, paren_roles(), nullptr};
      w.cont = cont();
      return ep::make(w);
    }
    if (kw == "wait?") {
      auto [k, self] = endpoint();
      expect("<-");
      Proc::WaitIn w{k, paren_roles(), self, AggOp::Id, VarName(), nullptr};
      w.op = agg();
      w.var = var_group();
      w.cont = cont();
      return ep::make(w);
    }
    if (kw == "if") {
      Proc::If i;
      i.guard = expr_group();
      expect("{");
      i.then_branch = proc();
      expect("}");
      if (word() != "else") fail("expected 'else'");
      expect("{");
      i.else_branch = proc();
      expect("}");
      return ep::make(i);
    }
    fail("unknown process keyword '" + kw + "'");
  }

  bool flag() {
    auto w = ident();
    if (w == "true") return true;
    if (w == "false") return false;
    fail("expected true or false");
  }

  OptValue opt_value() {
    auto w = ident();
    if (w == "none") return std::nullopt;
    if (w != "some") fail("expected some(..) or none");
    std::size_t at = pos_;
    auto text = group();
    OptValue v;
    try {
      v = eval(parse_expr(text));
    } catch (const SyntaxError& e) {
      throw EpqSyntaxError(at, std::string("bad value: ") + e.what());
    }
    if (!v) throw EpqSyntaxError(at, "value does not evaluate");
    return v;
  }

  QueueMsg msg() {
    expect("(");
    if (peek("[")) {
      InMsg m;
      m.q = quality();
      expect("<");
      if (!peek(">")) {
        for (;;) {
          InMsg::Slot s;
          s.role = Role(ident());
          expect(":");
          s.done = flag();
          expect(":");
          s.value = opt_value();
          m.from.push_back(s);
          if (!eat(",")) break;
        }
      }
      expect(">");
      expect(",");
      m.to = Role(ident());
      expect(")");
      return m;
    }
    OutMsg m;
    m.from = Role(ident());
    expect(",");
    m.q = quality();
    expect("<");
    if (!peek(">")) {
      for (;;) {
        Role r(ident());
        expect(":");
        m.to.push_back({r, flag()});
        if (!eat(",")) break;
      }
    }
    expect(">");
    expect(":");
    ws();
    if (s_.substr(pos_, 5) == "label") {
      word();
      m.is_select = true;
      m.label = Label(ident());
    } else {
      m.value = opt_value();
    }
    expect(")");
    return m;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string print_proc(const ProcPtr& p) {
  std::string out;
  print_into(p, out, 0, false);
  return out;
}

std::string print_proc_pretty(const ProcPtr& p, int indent) {
  std::string out;
  print_into(p, out, indent, true);
  return out;
}

std::string print_network(const Network& n) {
  std::string out;
  if (!n.restricted.empty()) {
    out += "restrict ";
    for (std::size_t i = 0; i < n.restricted.size(); ++i) out += (i ? ", " : "") + n.restricted[i];
    out += " ;\n";
  }
  for (const auto& c : n.components) {
    out += std::string(c.proc->is_replicated() ? "replicated " : "thread ") + c.thread.str() + " :\n";
    out += print_proc_pretty(c.proc, 1) + " ;\n";
  }
  for (const auto& [k, q] : n.queues) {
    out += "queue " + k.str() + " : [";
    for (std::size_t i = 0; i < q.size(); ++i) out += (i ? " ; " : "") + print_msg(q[i]);
    out += "] ;\n";
  }
  return out;
}

Network parse_network(std::string_view text) { return EpqParser(text).network(); }
ProcPtr parse_proc(std::string_view text) { return EpqParser(text).proc_only(); }

nlohmann::json network_manifest(const Network& n) {
  nlohmann::json j;
  j["restricted"] = n.restricted;
  j["processes"] = nlohmann::json::array();
  j["replicated"] = nlohmann::json::array();
  for (const auto& c : n.components) {
    nlohmann::json e{{"thread", c.thread.str()}, {"file", c.thread.str() + ".epq"}};
    if (c.proc->is_replicated()) {
      const auto& a = std::get<Proc::Accept>(c.proc->node);
      e["service"] = a.service.str();
      e["role"] = a.role.str();
      e["file"] = a.service.str() + "." + a.role.str() + ".epq";
      j["replicated"].push_back(e);
    } else {
      j["processes"].push_back(e);
    }
  }
  j["queues"] = nlohmann::json::array();
  for (const auto& [k, q] : n.queues) j["queues"].push_back({{"session", k.str()}, {"length", q.size()}});
  return j;
}

}  // namespace gcq
