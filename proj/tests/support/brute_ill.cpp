#include "brute_ill.hpp"

namespace gcqtest {

namespace {

using K = Formula::Kind;
using Ctx = std::vector<FormulaPtr>;

Ctx drop(const Ctx& c, std::size_t i) {
  Ctx out;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j != i) out.push_back(c[j]);
  return out;
}

bool search(const Ctx& ctx, const FormulaPtr& goal) {
  // right rules
  switch (goal->kind) {
    case K::True:
      if (ctx.empty()) return true;
      break;
    case K::Own:
      if (ctx.size() == 1 && ctx[0]->kind == K::Own && ctx[0]->key == goal->key) return true;
      break;
    case K::Tensor:
      for (std::size_t m = 0; m < (std::size_t{1} << ctx.size()); ++m) {
        Ctx a, b;
        for (std::size_t i = 0; i < ctx.size(); ++i) ((m >> i) & 1u ? a : b).push_back(ctx[i]);
        if (search(a, goal->left) && search(b, goal->right)) return true;
      }
      break;
    case K::Plus:
      if (search(ctx, goal->left) || search(ctx, goal->right)) return true;
      break;
    case K::Lolli: {
      Ctx c = ctx;
      c.push_back(goal->left);
      if (search(c, goal->right)) return true;
      break;
    }
  }
  // left rules
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto& f = ctx[i];
    Ctx rest = drop(ctx, i);
    switch (f->kind) {
      case K::True:
        if (search(rest, goal)) return true;
        break;
      case K::Tensor: {
        Ctx c = rest;
        c.push_back(f->left);
        c.push_back(f->right);
        if (search(c, goal)) return true;
        break;
      }
      case K::Plus: {
        Ctx a = rest, b = rest;
        a.push_back(f->left);
        b.push_back(f->right);
        if (search(a, goal) && search(b, goal)) return true;
        break;
      }
      case K::Lolli:
        for (std::size_t m = 0; m < (std::size_t{1} << rest.size()); ++m) {
          Ctx a, b;
          for (std::size_t j = 0; j < rest.size(); ++j) ((m >> j) & 1u ? a : b).push_back(rest[j]);
          b.push_back(f->right);
          if (search(a, f->left) && search(b, goal)) return true;
        }
        break;
      case K::Own: break;
    }
  }
  return false;
}

}  // namespace

bool brute_prove(const std::vector<FormulaPtr>& ctx, const FormulaPtr& goal) { return search(ctx, goal); }

}  // namespace gcqtest
