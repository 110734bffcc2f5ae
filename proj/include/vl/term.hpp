#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vl/resource.hpp"

namespace vl {

struct Span {
  int line = 0;
  int col = 0;
};

class Term;

using Entry = std::pair<Label, Term>;
using Entries = std::vector<Entry>;

namespace node {
struct Var;
struct App;
struct Abs;
struct Int;
struct Promote;
struct LetBox;
struct Record;
struct Extract;
struct Comp;
struct Add;
}  // namespace node

/// Handle to an immutable AST node. Copies share structure.
///
/// `Comp` is the versioned computation <l = t | l_i> that only arises while
/// evaluating; the parser never produces it.
class Term {
 public:
  enum class Kind { Var, App, Abs, Int, Promote, LetBox, Record, Extract, Comp, Add };

  struct Node;

  static Term var(std::string name, Span s = {});
  static Term app(Term fn, Term arg, Span s = {});
  static Term abs(std::string param, Term body, Span s = {});
  static Term integer(std::int64_t value, Span s = {});
  static Term promote(Term body, std::optional<Resource> annotation = std::nullopt, Span s = {});
  static Term let_box(std::string name, Term bound, Term body, Span s = {});
  static Term record(Entries entries, Label default_label, Span s = {});
  static Term extract(Term inner, Label label, Span s = {});
  static Term comp(Entries entries, Label default_label, Span s = {});
  static Term add(Term lhs, Term rhs, Span s = {});

  Kind kind() const;
  Span span() const;

  template <class T>
  const T* as() const;

  // Lambdas, integers, promotions and versioned records.
  bool is_value() const {
    auto k = kind();
    return k == Kind::Abs || k == Kind::Int || k == Kind::Promote || k == Kind::Record;
  }

  // Identity of the shared node; structurally equal terms may differ.
  const Node* id() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  template <class T>
  static Term make(T payload, Span s);

  std::shared_ptr<const Node> node_;
};

namespace node {
struct Var {
  std::string name;
};
struct App {
  Term fn;
  Term arg;
};
struct Abs {
  std::string param;
  Term body;
};
struct Int {
  std::int64_t value;
};
struct Promote {
  Term body;
  std::optional<Resource> annotation;
};
struct LetBox {
  std::string name;
  Term bound;
  Term body;
};
struct Record {
  Entries entries;
  Label default_label;
};
struct Extract {
  Term inner;
  Label label;
};
struct Comp {
  Entries entries;
  Label default_label;
};
struct Add {
  Term lhs;
  Term rhs;
};
}  // namespace node

struct Term::Node {
  std::variant<node::Var, node::App, node::Abs, node::Int, node::Promote, node::LetBox,
               node::Record, node::Extract, node::Comp, node::Add>
      data;
  Span span;
};

template <class T>
Term Term::make(T payload, Span s) {
  return Term{std::make_shared<const Node>(Node{std::move(payload), s})};
}

template <class T>
const T* Term::as() const {
  return std::get_if<T>(&node_->data);
}

inline Term::Kind Term::kind() const { return static_cast<Kind>(node_->data.index()); }
inline Span Term::span() const { return node_->span; }

namespace detail {
inline void validate_entries(const Entries& entries, const Label& def) {
  if (entries.empty()) throw std::invalid_argument("versioned record needs at least one entry");
  std::set<Label> seen;
  for (const auto& [l, t] : entries)
    if (!seen.insert(l).second)
      throw std::invalid_argument("duplicate version label '" + l.name() + "'");
  if (!seen.count(def))
    throw std::invalid_argument("default label '" + def.name() + "' is not defined");
}
}  // namespace detail

inline Term Term::var(std::string name, Span s) { return make(node::Var{std::move(name)}, s); }
inline Term Term::app(Term fn, Term arg, Span s) {
  return make(node::App{std::move(fn), std::move(arg)}, s);
}
inline Term Term::abs(std::string param, Term body, Span s) {
  return make(node::Abs{std::move(param), std::move(body)}, s);
}
inline Term Term::integer(std::int64_t value, Span s) { return make(node::Int{value}, s); }
inline Term Term::promote(Term body, std::optional<Resource> annotation, Span s) {
  return make(node::Promote{std::move(body), std::move(annotation)}, s);
}
inline Term Term::let_box(std::string name, Term bound, Term body, Span s) {
  return make(node::LetBox{std::move(name), std::move(bound), std::move(body)}, s);
}
inline Term Term::record(Entries entries, Label default_label, Span s) {
  detail::validate_entries(entries, default_label);
  return make(node::Record{std::move(entries), std::move(default_label)}, s);
}
inline Term Term::extract(Term inner, Label label, Span s) {
  return make(node::Extract{std::move(inner), std::move(label)}, s);
}
inline Term Term::comp(Entries entries, Label default_label, Span s) {
  detail::validate_entries(entries, default_label);
  return make(node::Comp{std::move(entries), std::move(default_label)}, s);
}
inline Term Term::add(Term lhs, Term rhs, Span s) {
  return make(node::Add{std::move(lhs), std::move(rhs)}, s);
}

namespace detail {
inline bool entries_equal(const Entries& a, const Entries& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].first != b[i].first || !(a[i].second == b[i].second)) return false;
  return true;
}
}  // namespace detail

// Structural equality; spans are ignored.
inline bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: return a.as<node::Var>()->name == b.as<node::Var>()->name;
    case Term::Kind::App: {
      auto *x = a.as<node::App>(), *y = b.as<node::App>();
      return x->fn == y->fn && x->arg == y->arg;
    }
    case Term::Kind::Abs: {
      auto *x = a.as<node::Abs>(), *y = b.as<node::Abs>();
      return x->param == y->param && x->body == y->body;
    }
    case Term::Kind::Int: return a.as<node::Int>()->value == b.as<node::Int>()->value;
    case Term::Kind::Promote: {
      auto *x = a.as<node::Promote>(), *y = b.as<node::Promote>();
      return x->annotation == y->annotation && x->body == y->body;
    }
    case Term::Kind::LetBox: {
      auto *x = a.as<node::LetBox>(), *y = b.as<node::LetBox>();
      return x->name == y->name && x->bound == y->bound && x->body == y->body;
    }
    case Term::Kind::Record: {
      auto *x = a.as<node::Record>(), *y = b.as<node::Record>();
      return x->default_label == y->default_label && detail::entries_equal(x->entries, y->entries);
    }
    case Term::Kind::Extract: {
      auto *x = a.as<node::Extract>(), *y = b.as<node::Extract>();
      return x->label == y->label && x->inner == y->inner;
    }
    case Term::Kind::Comp: {
      auto *x = a.as<node::Comp>(), *y = b.as<node::Comp>();
      return x->default_label == y->default_label && detail::entries_equal(x->entries, y->entries);
    }
    case Term::Kind::Add: {
      auto *x = a.as<node::Add>(), *y = b.as<node::Add>();
      return x->lhs == y->lhs && x->rhs == y->rhs;
    }
  }
  return false;
}

}  // namespace vl
