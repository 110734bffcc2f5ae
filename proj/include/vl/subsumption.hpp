#pragma once

#include "vl/context.hpp"
#include "vl/type.hpp"

namespace vl {

// A <: B. Boxes are covariant in the payload and contravariant in the
// resource (a value available in more versions may stand in for one
// available in fewer); arrows are contravariant in the parameter.
inline bool subtype(const Type& a, const Type& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Type::Kind::Int: return true;
    case Type::Kind::Box: return leq(b.resource(), a.resource()) && subtype(a.inner(), b.inner());
    case Type::Kind::Arrow: return subtype(b.param(), a.param()) && subtype(a.result(), b.result());
  }
  return false;
}

// Assumption subsumption: [A]_r <: [B]_r' iff A <: B and r' ⊑ r.
inline bool assumption_subtype(const Assumption& a, const Assumption& b) {
  if (a.flavor != b.flavor) return false;
  if (!subtype(a.type, b.type)) return false;
  return a.is_linear() || leq(b.grade, a.grade);
}

// Γ ⊑ Δ: same variables; for each x, Δ(x) <: Γ(x). For graded assumptions
// this means the grade on the left is below the grade on the right.
inline bool context_leq(const TypingContext& g1, const TypingContext& g2) {
  if (g1.size() != g2.size()) return false;
  for (const auto& [x, left] : g1.entries()) {
    const auto* right = g2.find(x);
    if (!right || !assumption_subtype(*right, left)) return false;
  }
  return true;
}

}  // namespace vl
