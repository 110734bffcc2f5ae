#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <utility>

#include "vl/resource.hpp"

namespace vl {

// Int | A -> B | []_r A. Immutable, shared, compared structurally.
class Type {
 public:
  enum class Kind { Int, Arrow, Box };

  Type() : Type(integer()) {}

  static Type integer() {
    static const Type t{std::make_shared<const Node>(Node{Kind::Int, {}, nullptr, nullptr})};
    return t;
  }
  static Type arrow(Type param, Type result) {
    return Type{std::make_shared<const Node>(
        Node{Kind::Arrow, {}, std::move(param.node_), std::move(result.node_)})};
  }
  static Type box(Resource r, Type inner) {
    return Type{
        std::make_shared<const Node>(Node{Kind::Box, std::move(r), std::move(inner.node_), nullptr})};
  }

  Kind kind() const { return node_->kind; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_arrow() const { return kind() == Kind::Arrow; }
  bool is_box() const { return kind() == Kind::Box; }

  Type param() const { return Type{node_->a}; }
  Type result() const { return Type{node_->b}; }
  Type inner() const { return Type{node_->a}; }
  const Resource& resource() const { return node_->res; }

  friend bool operator==(const Type& x, const Type& y) {
    if (x.node_ == y.node_) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case Kind::Int: return true;
      case Kind::Arrow: return x.param() == y.param() && x.result() == y.result();
      case Kind::Box: return x.resource() == y.resource() && x.inner() == y.inner();
    }
    return false;
  }

  // Nesting depth; Int has depth 1.
  int depth() const {
    switch (kind()) {
      case Kind::Int: return 1;
      case Kind::Arrow: return 1 + std::max(param().depth(), result().depth());
      case Kind::Box: return 1 + inner().depth();
    }
    return 1;
  }

  // `Int`, `Int -> Int`, `[]_{l1,l2} Int`, `[]_{l1} (Int -> Int)`.
  std::string to_string() const {
    switch (kind()) {
      case Kind::Int: return "Int";
      case Kind::Arrow: {
        auto lhs = param().to_string();
        if (param().is_arrow()) lhs = "(" + lhs + ")";
        return lhs + " -> " + result().to_string();
      }
      case Kind::Box: {
        auto body = inner().to_string();
        if (inner().is_arrow()) body = "(" + body + ")";
        return "[]_" + resource().to_string() + " " + body;
      }
    }
    return "?";
  }

 private:
  struct Node {
    Kind kind;
    Resource res;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Type& t) { return os << t.to_string(); }

}  // namespace vl
