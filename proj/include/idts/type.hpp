#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace idts {

/// Simple type: a base type or an arrow. Immutable, cheap to copy.
class Type {
 public:
  Type() = default;

  static Type base(std::string name);
  static Type arrow(Type domain, Type codomain);
  /// args[0] -> ... -> args[n-1] -> result
  static Type curried(std::span<const Type> args, Type result);

  bool valid() const { return node_ != nullptr; }
  bool is_base() const;
  bool is_arrow() const { return valid() && !is_base(); }

  const std::string& name() const;
  const Type& domain() const;
  const Type& codomain() const;

  /// For s1 -> ... -> sn -> b returns (s1 ... sn).
  std::vector<Type> argument_types() const;
  /// For s1 -> ... -> sn -> b returns b.
  const Type& target() const;
  std::size_t arrow_count() const;

  std::string str() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator<(const Type& a, const Type& b) { return a.str() < b.str(); }

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Type::Node {
  std::string name;  // empty for arrows
  Type domain;
  Type codomain;
};

}  // namespace idts
