#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gcq/choreography.hpp"
#include "gcq/global_type.hpp"

namespace gcq {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct SyntaxError : std::runtime_error {
  SyntaxError(std::string code, Span span, std::string message, std::vector<std::string> expected = {})
      : std::runtime_error(message), code(std::move(code)), span(span), expected(std::move(expected)) {}

  std::string code;  // SyntaxError, DuplicateThreadInInit, SelectNotAll, ...
  Span span;
  std::vector<std::string> expected;
};

struct ServiceDecl {
  ServiceName name;
  // Empty when the declaration leaves the active/service split open.
  std::vector<Role> actives;
  std::vector<Role> services;
  bool has_split = false;
  GTypePtr type;
  Span span;
};

struct CapsDecl {
  std::string name;
  std::vector<CapAtom> atoms;
  Span span;
};

struct Program {
  std::vector<ServiceDecl> services;
  std::vector<CapsDecl> caps;
  ChorPtr body;
  std::map<const Chor*, Span> spans;
};

struct ParseOptions {
  bool allow_partial_select = false;
};

Program parse(std::string_view text, const ParseOptions& opts = {});
ChorPtr parse_chor(std::string_view text, const ParseOptions& opts = {});
GTypePtr parse_gtype(std::string_view text);
ExprPtr parse_expr(std::string_view text);

// line:col of a byte offset, 1-based.
std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset);

std::string pretty_print(const ChorPtr& c);
std::string print_program(const Program& p);
std::string print_interaction(const Interaction& a);
std::string print_athr(const AnnotatedThread& a, bool in_init = false);

}  // namespace gcq
