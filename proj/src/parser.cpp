#include "gcq/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>

namespace gcq {

namespace {

enum class Tok { Ident, Int, Float, String, Punct, Keyword, Eof };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "service", "caps",  "choreography", "end",   "start", "bcast", "reduce", "select", "if",
      "else",    "all",   "any",          "true",  "false", "some",  "none",   "date",   "bool",
      "int",     "string", "float",       "branch"};
  return k;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Eof: return "end of input";
    case Tok::String: return "string literal";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::Eof, "", {pos_, pos_}});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  Token next() {
    std::size_t start = pos_;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '\''))
        ++pos_;
      std::string word(src_.substr(start, pos_ - start));
      return {keywords().count(word) ? Tok::Keyword : Tok::Ident, word, {start, pos_}};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      bool is_float = false;
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        is_float = true;
        ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          is_float = true;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      return {is_float ? Tok::Float : Tok::Int, std::string(src_.substr(start, pos_ - start)), {start, pos_}};
    }
    if (c == '"') {
      ++pos_;
      std::string val;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
          char e = src_[pos_ + 1];
          val += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          pos_ += 2;
        } else {
          val += src_[pos_++];
        }
      }
      if (pos_ >= src_.size()) throw SyntaxError("SyntaxError", {start, pos_}, "unterminated string literal");
      ++pos_;
      return {Tok::String, val, {start, pos_}};
    }
    static const char* two[] = {"->", "&&", "||"};
    for (const char* p : two) {
      if (src_.substr(pos_, 2) == p) {
        pos_ += 2;
        return {Tok::Punct, p, {start, pos_}};
      }
    }
    static const std::string single = "()[]{}<>,;:.@/+-*=!";
    if (single.find(c) != std::string::npos) {
      ++pos_;
      return {Tok::Punct, std::string(1, c), {start, pos_}};
    }
    throw SyntaxError("SyntaxError", {start, start + 1}, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : toks_(Lexer(src).run()), opts_(opts) {}

  Program program() {
    Program p;
    while (at_kw("service") || at_kw("caps")) {
      if (at_kw("service")) p.services.push_back(service_decl());
      else p.caps.push_back(caps_decl());
    }
    expect_kw("choreography");
    expect("{");
    p.body = chor();
    expect("}");
    expect_eof();
    p.spans = std::move(spans_);
    validate_decls(p);
    return p;
  }

  ChorPtr chor_only() {
    auto c = chor();
    expect_eof();
    return c;
  }

  GTypePtr gtype_only() {
    auto g = gtype();
    expect_eof();
    return g;
  }

  ExprPtr expr_only() {
    auto e = expr();
    expect_eof();
    return e;
  }

 private:
  // ---------------------------------------------------------------- tokens
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  bool at(const std::string& p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_kw(const std::string& k) const { return peek().kind == Tok::Keyword && peek().text == k; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string msg = "expected ";
    for (std::size_t j = 0; j < expected.size(); ++j) msg += (j ? " or " : "") + expected[j];
    msg += ", found " + describe(peek());
    throw SyntaxError("SyntaxError", peek().span, msg, std::move(expected));
  }

  Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  Token expect(const std::string& p) {
    if (!at(p)) fail({"'" + p + "'"});
    return take();
  }
  Token expect_kw(const std::string& k) {
    if (!at_kw(k)) fail({"'" + k + "'"});
    return take();
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident) fail({what});
    return take().text;
  }
  void expect_eof() {
    if (peek().kind != Tok::Eof) fail({"end of input"});
  }
  std::size_t here() const { return peek().span.begin; }
  std::size_t prev_end() const { return i_ == 0 ? 0 : toks_[i_ - 1].span.end; }

  // ---------------------------------------------------------------- decls
  ServiceDecl service_decl() {
    ServiceDecl d;
    std::size_t start = here();
    expect_kw("service");
    d.name = ServiceName(ident("service name"));
    expect(":");
    if (at("<")) {
      take();
      d.has_split = true;
      if (!at(";")) d.actives = role_list();
      expect(";");
      if (!at(">")) d.services = role_list();
      expect(">");
    }
    d.type = gtype();
    expect(";");
    d.span = {start, prev_end()};
    if (auto p = gtype_problem(d.type); !p.empty()) throw SyntaxError("BadGlobalType", d.span, p);
    return d;
  }

  CapsDecl caps_decl() {
    CapsDecl d;
    std::size_t start = here();
    expect_kw("caps");
    d.name = ident("signature name");
    expect("=");
    expect("{");
    d.atoms.emplace_back(ident("capability"));
    while (at(",")) {
      take();
      d.atoms.emplace_back(ident("capability"));
    }
    expect("}");
    expect(";");
    d.span = {start, prev_end()};
    return d;
  }

  std::vector<Role> role_list() {
    std::vector<Role> out;
    out.emplace_back(ident("role"));
    while (at(",")) {
      take();
      out.emplace_back(ident("role"));
    }
    return out;
  }

  Sort sort() {
    if (peek().kind == Tok::Keyword) {
      if (auto s = sort_from_name(peek().text)) {
        take();
        return *s;
      }
    }
    fail({"sort"});
  }

  GTypePtr gtype() {
    if (at_kw("end")) {
      take();
      return gt::end();
    }
    if (at_kw("bcast")) {
      take();
      Role from(ident("role"));
      expect("->");
      expect("(");
      auto to = role_list();
      expect(")");
      expect(":");
      Sort s = sort();
      expect(".");
      return gt::bcast(from, to, s, gtype());
    }
    if (at_kw("reduce")) {
      take();
      expect("(");
      auto from = role_list();
      expect(")");
      expect("->");
      Role to(ident("role"));
      expect(":");
      Sort s = sort();
      expect(".");
      return gt::red(from, to, s, gtype());
    }
    if (at_kw("branch")) {
      take();
      Role from(ident("role"));
      expect("->");
      expect("(");
      auto to = role_list();
      expect(")");
      expect("{");
      std::map<Label, GTypePtr> branches;
      do {
        if (!branches.empty()) take();
        auto start = here();
        Label l(ident("label"));
        expect(":");
        if (branches.count(l)) throw SyntaxError("DuplicateLabel", {start, prev_end()}, "label " + l.str() + " repeated");
        branches[l] = gtype();
      } while (at(","));
      expect("}");
      return gt::branch(from, to, branches);
    }
    fail({"'end'", "'bcast'", "'reduce'", "'branch'"});
  }

  // ---------------------------------------------------------------- choreographies
  ChorPtr chor() {
    std::size_t start = here();
    ChorPtr c;
    if (at_kw("end")) {
      take();
      c = ch::end();
      // the shared end node carries no span
      return c;
    }
    if (at_kw("if")) {
      take();
      auto g = expr();
      expect("@");
      Thread t(ident("thread"));
      expect("{");
      auto a = chor();
      expect("}");
      expect_kw("else");
      expect("{");
      auto b = chor();
      expect("}");
      c = ch::if_(g, t, a, b);
    } else {
      auto act = interaction();
      expect(";");
      c = ch::seq(std::move(act), chor());
    }
    spans_[c.get()] = {start, prev_end()};
    return c;
  }

  Quality quality() {
    expect("[");
    Quality q;
    if (at_kw("all")) {
      take();
      q = Quality::all();
    } else if (at_kw("any")) {
      take();
      q = Quality::any();
    } else if (peek().kind == Tok::Int) {
      unsigned m = nat();
      expect("/");
      unsigned n = nat();
      q = Quality::ratio(m, n);
    } else {
      fail({"'all'", "'any'", "ratio m/n"});
    }
    expect("]");
    return q;
  }

  unsigned nat() {
    if (peek().kind != Tok::Int) fail({"natural number"});
    auto t = take();
    unsigned v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      throw SyntaxError("SyntaxError", t.span, "number out of range");
    return v;
  }

  CapSet atoms() {
    CapSet s;
    s.insert(CapAtom(ident("capability")));
    while (at(",")) {
      take();
      s.insert(CapAtom(ident("capability")));
    }
    return s;
  }

  AnnotatedThread athr(bool in_init) {
    AnnotatedThread a;
    a.thread = Thread(ident("thread"));
    expect("[");
    a.role = Role(ident("role"));
    expect("]");
    if (at("{")) {
      auto start = here();
      take();
      CapSet first;
      if (peek().kind == Tok::Ident) first = atoms();
      if (at(";")) {
        take();
        a.req = first;
        if (peek().kind == Tok::Ident) a.off = atoms();
        if (in_init && !a.req.empty())
          throw SyntaxError("InitRequiresCaps", {start, prev_end()}, "a session start takes no required capabilities");
      } else if (in_init) {
        a.off = first;
      } else {
        a.req = first;
      }
      expect("}");
    }
    return a;
  }

  std::vector<AnnotatedThread> athr_list(bool in_init, bool allow_empty) {
    std::vector<AnnotatedThread> out;
    expect("(");
    if (allow_empty && at(")")) {
      take();
      return out;
    }
    out.push_back(athr(in_init));
    while (at(",")) {
      take();
      out.push_back(athr(in_init));
    }
    expect(")");
    return out;
  }

  void check_quality(const Quality& q, std::size_t n, Span span) {
    if (auto p = quality_problem(q, n); !p.empty()) throw SyntaxError("BadQuality", span, p);
  }

  void check_distinct(const std::vector<AnnotatedThread>& ps, Span span, const std::string& code) {
    std::set<Thread> seen;
    for (const auto& p : ps)
      if (!seen.insert(p.thread).second) throw SyntaxError(code, span, "thread " + p.thread.str() + " repeated");
  }

  Interaction interaction() {
    std::size_t start = here();
    if (at_kw("start")) {
      take();
      Init i;
      i.service = ServiceName(ident("service name"));
      expect("(");
      i.key = SessionKey(ident("session key"));
      expect(")");
      i.actives = athr_list(true, true);
      expect("->");
      i.services = athr_list(true, true);
      Span span{start, prev_end()};
      auto all = i.actives;
      all.insert(all.end(), i.services.begin(), i.services.end());
      if (all.size() < 2) throw SyntaxError("SyntaxError", span, "a session needs at least two participants");
      if (i.actives.empty()) throw SyntaxError("SyntaxError", span, "a session needs an active participant");
      check_distinct(all, span, "DuplicateThreadInInit");
      std::set<Role> roles;
      for (const auto& p : all)
        if (!roles.insert(p.role).second)
          throw SyntaxError("DuplicateRoleInInit", span, "role " + p.role.str() + " repeated in session start");
      return i;
    }
    if (at_kw("bcast")) {
      take();
      Bcast b;
      b.key = SessionKey(ident("session key"));
      b.q = quality();
      b.sender = athr(false);
      expect(".");
      b.expr = expr();
      expect("->");
      expect("(");
      do {
        if (!b.receivers.empty()) take();
        Receiver r;
        r.at = athr(false);
        expect(":");
        r.var = VarName(ident("variable"));
        b.receivers.push_back(r);
      } while (at(","));
      expect(")");
      Span span{start, prev_end()};
      check_quality(b.q, b.receivers.size(), span);
      check_distinct(participants(b), span, "DuplicateThread");
      return b;
    }
    if (at_kw("reduce")) {
      take();
      Reduce r;
      r.key = SessionKey(ident("session key"));
      r.q = quality();
      auto opTok = peek();
      auto op = agg_from_name(ident("aggregation operator"));
      if (!op) throw SyntaxError("SyntaxError", opTok.span, "unknown operator " + opTok.text, {"avg", "max", "min", "sum", "id"});
      r.op = *op;
      expect("(");
      do {
        if (!r.senders.empty()) take();
        Sender s;
        s.at = athr(false);
        expect(".");
        s.expr = expr();
        r.senders.push_back(s);
      } while (at(","));
      expect(")");
      expect("->");
      r.receiver = athr(false);
      expect(":");
      r.var = VarName(ident("variable"));
      Span span{start, prev_end()};
      check_quality(r.q, r.senders.size(), span);
      check_distinct(participants(r), span, "DuplicateThread");
      return r;
    }
    if (at_kw("select")) {
      take();
      Select s;
      s.key = SessionKey(ident("session key"));
      auto qstart = here();
      s.q = quality();
      Span qspan{qstart, prev_end()};
      s.sender = athr(false);
      expect("->");
      s.receivers = athr_list(false, false);
      expect(":");
      s.label = Label(ident("label"));
      Span span{start, prev_end()};
      if (!s.q.is_all() && !opts_.allow_partial_select)
        throw SyntaxError("SelectNotAll", qspan, "select requires quality 'all', found " + print_quality(s.q));
      check_quality(s.q, s.receivers.size(), span);
      check_distinct(participants(s), span, "DuplicateThread");
      return s;
    }
    fail({"'start'", "'bcast'", "'reduce'", "'select'", "'if'", "'end'"});
  }

  // ---------------------------------------------------------------- expressions
  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    auto l = and_expr();
    while (at("||")) {
      take();
      l = ex::binary(BinOp::Or, l, and_expr());
    }
    return l;
  }

  ExprPtr and_expr() {
    auto l = cmp_expr();
    while (at("&&")) {
      take();
      l = ex::binary(BinOp::And, l, cmp_expr());
    }
    return l;
  }

  ExprPtr cmp_expr() {
    auto l = add_expr();
    if (at("=") || at("<")) {
      auto op = take().text == "=" ? BinOp::Eq : BinOp::Lt;
      l = ex::binary(op, l, add_expr());
    }
    return l;
  }

  ExprPtr add_expr() {
    auto l = mul_expr();
    while (at("+") || at("-")) {
      auto op = take().text == "+" ? BinOp::Add : BinOp::Sub;
      l = ex::binary(op, l, mul_expr());
    }
    return l;
  }

  ExprPtr mul_expr() {
    auto l = unary_expr();
    while (at("*")) {
      take();
      l = ex::binary(BinOp::Mul, l, unary_expr());
    }
    return l;
  }

  ExprPtr unary_expr() {
    if (at("-")) {
      take();
      if (peek().kind == Tok::Int || peek().kind == Tok::Float) return number(true);
      return ex::unary(UnOp::Neg, unary_expr());
    }
    if (at("!")) {
      take();
      return ex::unary(UnOp::Not, unary_expr());
    }
    return primary();
  }

  ExprPtr number(bool negative) {
    auto t = take();
    if (t.kind == Tok::Int) {
      std::string text = (negative ? "-" : "") + t.text;
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size())
        throw SyntaxError("SyntaxError", t.span, "integer literal out of range");
      return ex::lit(Value(v));
    }
    double d = std::strtod(t.text.c_str(), nullptr);
    return ex::lit(Value(negative ? -d : d));
  }

  ExprPtr primary() {
    const auto& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Float) return number(false);
    if (t.kind == Tok::String) return ex::lit(Value(take().text));
    if (t.kind == Tok::Ident) return ex::var(take().text);
    if (at_kw("true") || at_kw("false")) return ex::lit(Value(take().text == "true"));
    if (at_kw("none")) {
      take();
      return ex::none();
    }
    if (at_kw("some")) {
      take();
      expect("(");
      auto e = expr();
      expect(")");
      return ex::some(e);
    }
    if (at_kw("date")) {
      take();
      expect("(");
      if (peek().kind != Tok::String) fail({"date string"});
      auto s = take();
      if (!valid_date(s.text)) throw SyntaxError("SyntaxError", s.span, "date must be YYYY-MM-DD");
      expect(")");
      return ex::lit(Value(Date{s.text}));
    }
    if (at("(")) {
      take();
      auto e = expr();
      expect(")");
      return e;
    }
    fail({"expression"});
  }

  static bool valid_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t j : {0, 1, 2, 3, 5, 6, 8, 9})
      if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    return true;
  }

  // ---------------------------------------------------------------- checks
  void validate_decls(const Program& p) {
    std::set<ServiceName> names;
    for (const auto& d : p.services)
      if (!names.insert(d.name).second)
        throw SyntaxError("DuplicateDeclaration", d.span, "service " + d.name.str() + " declared twice");
    if (p.caps.empty()) return;
    std::set<CapAtom> declared;
    for (const auto& d : p.caps) declared.insert(d.atoms.begin(), d.atoms.end());
    check_caps(p.body, declared, p.spans);
  }

  void check_caps(const ChorPtr& c, const std::set<CapAtom>& declared, const std::map<const Chor*, Span>& spans) {
    auto span_of = [&](const ChorPtr& n) {
      auto it = spans.find(n.get());
      return it == spans.end() ? Span{} : it->second;
    };
    if (auto* s = std::get_if<Chor::Seq>(&c->node)) {
      for (const auto& p : participants(s->act)) {
        for (const auto* set : {&p.req, &p.off})
          for (const auto& a : *set)
            if (!declared.count(a))
              throw SyntaxError("UndeclaredCapability", span_of(c), "capability " + a.str() + " is not declared");
      }
      check_caps(s->next, declared, spans);
    } else if (auto* i = std::get_if<Chor::If>(&c->node)) {
      check_caps(i->then_branch, declared, spans);
      check_caps(i->else_branch, declared, spans);
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  ParseOptions opts_;
  std::map<const Chor*, Span> spans_;
};

// ---------------------------------------------------------------- printing

std::string join_caps(const CapSet& s) {
  std::string out;
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ",";
    out += a.str();
    first = false;
  }
  return out;
}

void print_chor(const ChorPtr& c, int indent, std::string& out) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Chor::End>) {
          out += pad + "end";
        } else if constexpr (std::is_same_v<T, Chor::Seq>) {
          out += pad + print_interaction(x.act) + ";\n";
          print_chor(x.next, indent, out);
        } else if constexpr (std::is_same_v<T, Chor::If>) {
          out += pad + "if " + print_expr(x.guard) + " @ " + x.at.str() + " {\n";
          print_chor(x.then_branch, indent + 1, out);
          out += "\n" + pad + "} else {\n";
          print_chor(x.else_branch, indent + 1, out);
          out += "\n" + pad + "}";
        } else {
          // runtime binders have no concrete syntax; print as a comment
          out += pad + "// new " + x.name + "\n";
          print_chor(x.body, indent, out);
        }
      },
      c->node);
}

std::string athr_list_text(const std::vector<AnnotatedThread>& v, bool in_init) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + print_athr(v[i], in_init);
  return out + ")";
}

}  // namespace

std::string print_athr(const AnnotatedThread& a, bool in_init) {
  std::string out = a.thread.str() + "[" + a.role.str() + "]";
  if (a.req.empty() && a.off.empty()) return out;
  if (in_init && a.req.empty()) return out + "{" + join_caps(a.off) + "}";
  return out + "{" + join_caps(a.req) + ";" + join_caps(a.off) + "}";
}

std::string print_interaction(const Interaction& act) {
  return std::visit(
      [](const auto& a) -> std::string {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, Init>) {
          return "start " + a.service.str() + "(" + a.key.str() + ") " + athr_list_text(a.actives, true) + " -> " +
                 athr_list_text(a.services, true);
        } else if constexpr (std::is_same_v<A, Bcast>) {
          std::string out = "bcast " + a.key.str() + " [" + print_quality(a.q) + "] " + print_athr(a.sender) + "." +
                            print_expr(a.expr) + " -> (";
          for (std::size_t i = 0; i < a.receivers.size(); ++i)
            out += (i ? ", " : "") + print_athr(a.receivers[i].at) + " : " + a.receivers[i].var.str();
          return out + ")";
        } else if constexpr (std::is_same_v<A, Reduce>) {
          std::string out = "reduce " + a.key.str() + " [" + print_quality(a.q) + "] " + agg_name(a.op) + " (";
          for (std::size_t i = 0; i < a.senders.size(); ++i)
            out += (i ? ", " : "") + print_athr(a.senders[i].at) + "." + print_expr(a.senders[i].expr);
          return out + ") -> " + print_athr(a.receiver) + " : " + a.var.str();
        } else {
          return "select " + a.key.str() + " [" + print_quality(a.q) + "] " + print_athr(a.sender) + " -> " +
                 athr_list_text(a.receivers, false) + " : " + a.label.str();
        }
      },
      act);
}

std::string pretty_print(const ChorPtr& c) {
  std::string out;
  print_chor(c, 0, out);
  return out;
}

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& d : p.caps) {
    out += "caps " + d.name + " = {";
    for (std::size_t i = 0; i < d.atoms.size(); ++i) out += (i ? ", " : "") + d.atoms[i].str();
    out += "};\n";
  }
  for (const auto& d : p.services) {
    out += "service " + d.name.str() + " : ";
    if (d.has_split) {
      out += "<";
      for (std::size_t i = 0; i < d.actives.size(); ++i) out += (i ? ", " : "") + d.actives[i].str();
      out += " ; ";
      for (std::size_t i = 0; i < d.services.size(); ++i) out += (i ? ", " : "") + d.services[i].str();
      out += "> ";
    }
    out += print_gtype(d.type) + ";\n";
  }
  out += "choreography {\n";
  print_chor(p.body, 1, out);
  return out + "\n}\n";
}

Program parse(std::string_view text, const ParseOptions& opts) { return Parser(text, opts).program(); }
ChorPtr parse_chor(std::string_view text, const ParseOptions& opts) { return Parser(text, opts).chor_only(); }
GTypePtr parse_gtype(std::string_view text) { return Parser(text, {}).gtype_only(); }
ExprPtr parse_expr(std::string_view text) { return Parser(text, {}).expr_only(); }

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace gcq
