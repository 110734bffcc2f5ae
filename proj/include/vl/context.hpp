#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vl/resource.hpp"
#include "vl/type.hpp"

namespace vl {

// x : A (linear) or x : [A]_r (graded).
struct Assumption {
  enum class Flavor { Linear, Graded };

  Flavor flavor = Flavor::Linear;
  Type type;
  Resource grade;  // meaningful only when graded

  static Assumption linear(Type t) { return {Flavor::Linear, std::move(t), Resource{}}; }
  static Assumption graded(Type t, Resource r) { return {Flavor::Graded, std::move(t), std::move(r)}; }

  bool is_linear() const { return flavor == Flavor::Linear; }
  bool is_graded() const { return flavor == Flavor::Graded; }

  friend bool operator==(const Assumption& a, const Assumption& b) {
    if (a.flavor != b.flavor || !(a.type == b.type)) return false;
    return a.is_linear() || a.grade == b.grade;
  }

  std::string to_string() const {
    if (is_linear()) return type.to_string();
    return "[" + type.to_string() + "]_" + grade.to_string();
  }
};

class ContextError : public std::runtime_error {
 public:
  enum class Kind { DuplicateLinear, TypeMismatch, NotAllGraded };

  ContextError(Kind kind, std::string var)
      : std::runtime_error(describe(kind, var)), kind_(kind), var_(std::move(var)) {}

  Kind kind() const { return kind_; }
  const std::string& var() const { return var_; }

 private:
  static std::string describe(Kind k, const std::string& x) {
    switch (k) {
      case Kind::DuplicateLinear: return "linear assumption '" + x + "' appears in both contexts";
      case Kind::TypeMismatch: return "assumptions for '" + x + "' disagree on their type";
      case Kind::NotAllGraded: return "context contains linear assumption '" + x + "'";
    }
    return "context error";
  }

  Kind kind_;
  std::string var_;
};

// Ordered typing context. Keeps insertion order (for diagnostics) but
// compares as a map from variable to assumption.
class TypingContext {
 public:
  using Entry = std::pair<std::string, Assumption>;

  TypingContext() = default;
  TypingContext(std::initializer_list<Entry> entries) {
    for (const auto& [x, a] : entries) add(x, a);
  }

  // Replaces an existing assumption for x in place.
  TypingContext& add(const std::string& x, Assumption a) {
    if (auto* e = find_entry(x)) {
      e->second = std::move(a);
    } else {
      entries_.emplace_back(x, std::move(a));
    }
    return *this;
  }

  const Assumption* find(const std::string& x) const {
    for (const auto& e : entries_)
      if (e.first == x) return &e.second;
    return nullptr;
  }
  bool contains(const std::string& x) const { return find(x) != nullptr; }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // [Γ]: every assumption is graded.
  bool all_graded() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry& e) { return e.second.is_graded(); });
  }

  friend bool operator==(const TypingContext& a, const TypingContext& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [x, asm_a] : a.entries_) {
      const auto* asm_b = b.find(x);
      if (!asm_b || !(*asm_b == asm_a)) return false;
    }
    return true;
  }

  std::string to_string() const {
    if (entries_.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += ", ";
      out += entries_[i].first + " : " + entries_[i].second.to_string();
    }
    return out;
  }

 private:
  Entry* find_entry(const std::string& x) {
    for (auto& e : entries_)
      if (e.first == x) return &e;
    return nullptr;
  }

  std::vector<Entry> entries_;
};

// Γ1 + Γ2. Linear assumptions must be disjoint from everything in the other
// context; shared graded assumptions are merged with ⊕.
inline TypingContext context_concat(const TypingContext& g1, const TypingContext& g2) {
  TypingContext out;
  for (const auto& [x, a] : g1.entries()) {
    const auto* b = g2.find(x);
    if (!b) {
      out.add(x, a);
      continue;
    }
    if (a.is_linear() || b->is_linear()) throw ContextError(ContextError::Kind::DuplicateLinear, x);
    if (!(a.type == b->type)) throw ContextError(ContextError::Kind::TypeMismatch, x);
    out.add(x, Assumption::graded(a.type, plus(a.grade, b->grade)));
  }
  for (const auto& [x, b] : g2.entries())
    if (!g1.contains(x)) out.add(x, b);
  return out;
}

// r · Γ for an all-graded Γ.
inline TypingContext context_scalar_mult(const Resource& r, const TypingContext& g) {
  TypingContext out;
  for (const auto& [x, a] : g.entries()) {
    if (a.is_linear()) throw ContextError(ContextError::Kind::NotAllGraded, x);
    out.add(x, Assumption::graded(a.type, times(r, a.grade)));
  }
  return out;
}

// Γ1 + ... + Γn, empty context for n = 0.
inline TypingContext context_sum(const std::vector<TypingContext>& gs) {
  TypingContext acc;
  for (const auto& g : gs) acc = context_concat(acc, g);
  return acc;
}

}  // namespace vl
