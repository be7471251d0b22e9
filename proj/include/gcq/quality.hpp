#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gcq {

struct Quality {
  enum class Kind { All, Any, Ratio };
  Kind kind = Kind::All;
  unsigned m = 0;
  unsigned n = 0;

  static Quality all() { return {Kind::All, 0, 0}; }
  static Quality any() { return {Kind::Any, 0, 0}; }
  static Quality ratio(unsigned m, unsigned n) { return {Kind::Ratio, m, n}; }

  bool operator==(const Quality&) const = default;
  bool is_all() const { return kind == Kind::All; }
};

struct ArityMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

bool eval_quality(const Quality& q, const std::vector<bool>& flags);

// Checks the ratio bounds against a participant count; empty string when fine.
std::string quality_problem(const Quality& q, std::size_t participants);

std::string print_quality(const Quality& q);

}  // namespace gcq
