#include "gcq/value.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "gcq/quality.hpp"

namespace gcq {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Int: return "int";
    case Sort::String: return "string";
    case Sort::Date: return "date";
    case Sort::Float: return "float";
  }
  return "?";
}

std::optional<Sort> sort_from_name(const std::string& s) {
  if (s == "bool") return Sort::Bool;
  if (s == "int") return Sort::Int;
  if (s == "string") return Sort::String;
  if (s == "date") return Sort::Date;
  if (s == "float") return Sort::Float;
  return std::nullopt;
}

Sort Value::sort() const {
  switch (repr_.index()) {
    case 0: return Sort::Int;
    case 1: return Sort::Bool;
    case 2: return Sort::String;
    case 3: return Sort::Float;
    default: return Sort::Date;
  }
}

bool Value::operator<(const Value& o) const {
  if (repr_.index() != o.repr_.index()) return repr_.index() < o.repr_.index();
  switch (repr_.index()) {
    case 0: return as_int() < o.as_int();
    case 1: return as_bool() < o.as_bool();
    case 2: return std::get<std::string>(repr_) < std::get<std::string>(o.repr_);
    case 3: return as_float() < o.as_float();
    default: return std::get<Date>(repr_).iso < std::get<Date>(o.repr_).iso;
  }
}

static std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string Value::to_string() const {
  switch (repr_.index()) {
    case 0: return std::to_string(as_int());
    case 1: return as_bool() ? "true" : "false";
    case 2: return quote(std::get<std::string>(repr_));
    case 3: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", as_float());
      std::string s = buf;
      // shortest spelling that reads back exactly
      for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, as_float());
        if (std::strtod(buf, nullptr) == as_float()) {
          s = buf;
          break;
        }
      }
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    default: return "date(" + quote(std::get<Date>(repr_).iso) + ")";
  }
}

std::string opt_to_string(const OptValue& v) { return v ? "some(" + v->to_string() + ")" : "none"; }

const char* agg_name(AggOp op) {
  switch (op) {
    case AggOp::Avg: return "avg";
    case AggOp::Max: return "max";
    case AggOp::Min: return "min";
    case AggOp::Sum: return "sum";
    case AggOp::Id: return "id";
  }
  return "?";
}

std::optional<AggOp> agg_from_name(const std::string& s) {
  if (s == "avg") return AggOp::Avg;
  if (s == "max") return AggOp::Max;
  if (s == "min") return AggOp::Min;
  if (s == "sum") return AggOp::Sum;
  if (s == "id") return AggOp::Id;
  return std::nullopt;
}

namespace {

bool less_for_order(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) return a.as_number() < b.as_number();
  return a < b;
}

OptValue numeric_sum(const std::vector<Value>& vs) {
  bool all_int = true;
  for (const auto& v : vs) {
    if (!v.is_numeric()) return std::nullopt;
    all_int = all_int && v.is_int();
  }
  if (all_int) {
    std::int64_t acc = 0;
    for (const auto& v : vs)
      if (__builtin_add_overflow(acc, v.as_int(), &acc)) return std::nullopt;
    return Value(acc);
  }
  double acc = 0;
  for (const auto& v : vs) acc += v.as_number();
  return Value(acc);
}

}  // namespace

OptValue apply_agg(AggOp op, const std::vector<OptValue>& values) {
  std::vector<Value> present;
  for (const auto& v : values)
    if (v) present.push_back(*v);
  if (present.empty()) return std::nullopt;
  switch (op) {
    case AggOp::Id: return present.front();
    case AggOp::Sum: return numeric_sum(present);
    case AggOp::Avg: {
      auto s = numeric_sum(present);
      if (!s) return std::nullopt;
      auto n = static_cast<std::int64_t>(present.size());
      if (s->is_int()) return Value(s->as_int() / n);
      return Value(s->as_float() / static_cast<double>(n));
    }
    case AggOp::Max:
    case AggOp::Min: {
      for (const auto& v : present) {
        bool same = v.sort() == present.front().sort() || (v.is_numeric() && present.front().is_numeric());
        if (!same || v.is_bool()) return std::nullopt;
      }
      Value best = present.front();
      for (const auto& v : present) {
        if (op == AggOp::Max ? less_for_order(best, v) : less_for_order(v, best)) best = v;
      }
      return best;
    }
  }
  return std::nullopt;
}

bool eval_quality(const Quality& q, const std::vector<bool>& flags) {
  std::size_t count = 0;
  for (bool b : flags) count += b ? 1 : 0;
  switch (q.kind) {
    case Quality::Kind::All: return count == flags.size();
    case Quality::Kind::Any: return count >= 1;
    case Quality::Kind::Ratio:
      if (q.n != flags.size())
        throw ArityMismatch("quality " + print_quality(q) + " applied to " + std::to_string(flags.size()) +
                            " participants");
      return count >= q.m;
  }
  return false;
}

std::string quality_problem(const Quality& q, std::size_t participants) {
  if (q.kind != Quality::Kind::Ratio) return {};
  if (q.m < 1 || q.m > q.n) return "ratio " + print_quality(q) + " needs 1 <= m <= n";
  if (q.n != participants)
    return "ratio " + print_quality(q) + " over " + std::to_string(participants) + " participants";
  return {};
}

std::string print_quality(const Quality& q) {
  switch (q.kind) {
    case Quality::Kind::All: return "all";
    case Quality::Kind::Any: return "any";
    case Quality::Kind::Ratio: return std::to_string(q.m) + "/" + std::to_string(q.n);
  }
  return "?";
}

}  // namespace gcq
