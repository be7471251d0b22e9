#pragma once

#include <compare>
#include <ostream>
#include <string>
#include <utility>

namespace gcq {

// Name tokens compare by spelling; the tag keeps the namespaces apart.
template <typename Tag>
class Ident {
 public:
  Ident() = default;
  explicit Ident(std::string name) : name_(std::move(name)) {}

  const std::string& str() const { return name_; }
  bool empty() const { return name_.empty(); }

  auto operator<=>(const Ident&) const = default;
  bool operator==(const Ident&) const = default;

 private:
  std::string name_;
};

template <typename Tag>
std::ostream& operator<<(std::ostream& os, const Ident<Tag>& id) {
  return os << id.str();
}

struct ThreadTag {};
struct RoleTag {};
struct SessionTag {};
struct ServiceTag {};
struct VarTag {};
struct LabelTag {};
struct CapTag {};

using Thread = Ident<ThreadTag>;
using Role = Ident<RoleTag>;
using SessionKey = Ident<SessionTag>;
using ServiceName = Ident<ServiceTag>;
using VarName = Ident<VarTag>;
using Label = Ident<LabelTag>;
using CapAtom = Ident<CapTag>;

}  // namespace gcq
