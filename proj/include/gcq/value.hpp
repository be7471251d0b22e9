#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gcq {

enum class Sort { Bool, Int, String, Date, Float };

const char* sort_name(Sort s);
std::optional<Sort> sort_from_name(const std::string& s);

struct Date {
  std::string iso;  // YYYY-MM-DD
  bool operator==(const Date&) const = default;
};

class Value {
 public:
  using Repr = std::variant<std::int64_t, bool, std::string, double, Date>;

  Value(std::int64_t v) : repr_(v) {}
  Value(int v) : repr_(static_cast<std::int64_t>(v)) {}
  Value(bool v) : repr_(v) {}
  Value(std::string v) : repr_(std::move(v)) {}
  Value(const char* v) : repr_(std::string(v)) {}
  Value(double v) : repr_(v) {}
  Value(Date v) : repr_(std::move(v)) {}

  const Repr& repr() const { return repr_; }
  Sort sort() const;

  bool is_int() const { return std::holds_alternative<std::int64_t>(repr_); }
  bool is_bool() const { return std::holds_alternative<bool>(repr_); }
  bool is_float() const { return std::holds_alternative<double>(repr_); }
  bool is_numeric() const { return is_int() || is_float(); }
  std::int64_t as_int() const { return std::get<std::int64_t>(repr_); }
  bool as_bool() const { return std::get<bool>(repr_); }
  double as_float() const { return std::get<double>(repr_); }
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  bool operator==(const Value& o) const { return repr_ == o.repr_; }
  bool operator<(const Value& o) const;

  std::string to_string() const;

 private:
  Repr repr_;
};

using OptValue = std::optional<Value>;

std::string opt_to_string(const OptValue& v);

enum class AggOp { Avg, Max, Min, Sum, Id };

const char* agg_name(AggOp op);
std::optional<AggOp> agg_from_name(const std::string& s);

// Applies op to the present values; all-absent input gives none.
OptValue apply_agg(AggOp op, const std::vector<OptValue>& values);

}  // namespace gcq
