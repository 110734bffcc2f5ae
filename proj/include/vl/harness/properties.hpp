#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vl/context.hpp"
#include "vl/evaluator.hpp"
#include "vl/printer.hpp"
#include "vl/subsumption.hpp"
#include "vl/term.hpp"
#include "vl/term_ops.hpp"
#include "vl/typechecker.hpp"

namespace vl::harness {

struct Failure {
  std::string what;
};

// nullopt means the property held.
using Verdict = std::optional<Failure>;

// Notes collected while checking; type changes along traces are expected
// and only logged.
struct PropertyLog {
  int steps = 0;
  int type_changes = 0;
  int unsubsumed = 0;  // open terms: steps whose new type is not a subtype of the old
  std::vector<std::string> notes;
};

// Number of ways to split t into E[redex].
inline int redex_count(const Term& t) {
  int here = 0;
  int below = 0;
  switch (t.kind()) {
    case Term::Kind::Comp: here = 1; break;
    case Term::Kind::App: {
      const auto* n = t.as<node::App>();
      here = n->fn.kind() == Term::Kind::Abs;
      below = redex_count(n->fn);
      break;
    }
    case Term::Kind::Extract: {
      const auto* n = t.as<node::Extract>();
      if (n->inner.kind() == Term::Kind::Promote) here = 1;
      if (const auto* r = n->inner.as<node::Record>())
        for (const auto& e : r->entries) here |= e.first == n->label;
      below = redex_count(n->inner);
      break;
    }
    case Term::Kind::LetBox: {
      const auto* n = t.as<node::LetBox>();
      here = n->bound.kind() == Term::Kind::Promote || n->bound.kind() == Term::Kind::Record;
      below = redex_count(n->bound);
      break;
    }
    case Term::Kind::Add: {
      const auto* n = t.as<node::Add>();
      here = n->lhs.kind() == Term::Kind::Int && n->rhs.kind() == Term::Kind::Int;
      below = redex_count(n->lhs);
      if (n->lhs.kind() == Term::Kind::Int) below += redex_count(n->rhs);
      break;
    }
    default: break;
  }
  return here + below;
}

// A closed well-typed term is a value or steps.
inline Verdict check_progress(const Term& t) {
  auto r = step(t);
  if (r.status == StepResult::Status::Stuck) return Failure{"stuck: " + r.reason + " in " + print(t)};
  return std::nullopt;
}

// At most one decomposition exists, and step agrees with it.
inline Verdict check_determinism(const Term& t) {
  int n = redex_count(t);
  if (n > 1) return Failure{std::to_string(n) + " redex decompositions of " + print(t)};
  bool stepped = step(t).stepped();
  if (stepped != (n == 1))
    return Failure{"step " + std::string(stepped ? "fired" : "did not fire") + " with " +
                   std::to_string(n) + " decompositions: " + print(t)};
  return std::nullopt;
}

// Every term along the trace of t re-checks at a subtype of the previous
// type; progress and determinism are checked at each entry too.
inline Verdict check_preservation(const Term& t, const CheckOptions& opts, int fuel = 10000,
                                  PropertyLog* log = nullptr) {
  auto first = check_program(t, opts);
  if (!first.ok()) return Failure{"precondition: term does not type-check: " + print(t)};
  Type type = *first.type;
  Term cur = t;
  for (int i = 0; i < fuel; ++i) {
    if (auto v = check_progress(cur)) return v;
    if (auto v = check_determinism(cur)) return v;
    auto r = step(cur);
    if (!r.stepped()) return std::nullopt;
    if (log) ++log->steps;
    auto next = check_program(r.next, opts);
    if (!next.ok())
      return Failure{"step " + std::string(to_string(r.rule)) + " from " + print(cur) + " to " +
                     print(r.next) + " is ill-typed: " + next.diagnostics.front().render()};
    if (!subtype(*next.type, type))
      return Failure{"step " + std::string(to_string(r.rule)) + " from " + print(cur) + " : " +
                     type.to_string() + " to " + print(r.next) + " : " + next.type->to_string() +
                     " is not a subtype"};
    if (!(*next.type == type) && log) {
      ++log->type_changes;
      log->notes.push_back(type.to_string() + " became " + next.type->to_string() + " after " +
                           to_string(r.rule));
    }
    type = *next.type;
    cur = r.next;
  }
  return std::nullopt;
}

// The context a term needs: each graded assumption of ctx at the term's
// demand, or ⊥ when unused.
inline TypingContext demand_context(const TypingContext& ctx, const DemandMap& demand) {
  TypingContext out;
  for (const auto& [x, a] : ctx.entries()) {
    if (a.is_linear()) {
      out.add(x, a);
      continue;
    }
    const Usage* u = demand.find(x);
    out.add(x, Assumption::graded(a.type, u ? u->demand : Resource::bottom()));
  }
  return out;
}

// Preservation for a term open in graded variables: the context needed
// after each step is below the one needed before it. The step's type is
// expected to be a subtype of the previous one; when that fails only
// because a promotion's resource must shrink (possible once a versioned
// computation over a free variable lands inside it), the step is accepted
// at the smaller type, as the theorem permits any A', and counted.
inline Verdict check_preservation_open(const TypingContext& ctx, const Term& t, const CheckOptions& opts,
                                       int fuel = 10000, PropertyLog* log = nullptr) {
  auto first = check_in_context(ctx, t, opts);
  if (!first.ok()) return Failure{"precondition: term does not type-check under " + ctx.to_string()};
  Type type = *first.type;
  TypingContext needed = demand_context(ctx, infer(ctx, t, opts).demand);
  Term cur = t;
  for (int i = 0; i < fuel; ++i) {
    if (auto v = check_determinism(cur)) return v;
    auto r = step(cur);
    if (!r.stepped()) return std::nullopt;  // values, and terms blocked on a free variable
    if (log) ++log->steps;
    auto next = check_in_context(ctx, r.next, opts);
    Term checked = r.next;
    bool subsumed = next.ok() && subtype(*next.type, type);
    if (!subsumed) {
      Term erased = erase_annotations(r.next);
      auto relaxed = check_in_context(ctx, erased, opts);
      if (!relaxed.ok()) {
        const auto& why = next.ok() ? relaxed.diagnostics.front() : next.diagnostics.front();
        return Failure{"step " + std::string(to_string(r.rule)) + " to " + print(r.next) +
                       " is ill-typed: " + why.render()};
      }
      next = relaxed;
      checked = erased;
      if (log) {
        ++log->unsubsumed;
        if (log->notes.size() < 5)
          log->notes.push_back(print(cur) + " : " + type.to_string() + " steps to " + print(r.next) +
                               " : " + next.type->to_string());
      }
    }
    TypingContext after = demand_context(ctx, infer(ctx, checked, opts).demand);
    if (!context_leq(after, needed))
      return Failure{"step to " + print(r.next) + " needs " + after.to_string() + ", more than " +
                     needed.to_string()};
    if (!(*next.type == type) && log) ++log->type_changes;
    type = *next.type;
    needed = after;
    cur = r.next;
  }
  return std::nullopt;
}

// Linear substitution: Γ, x:A ⊢ t : B and Δ ⊢ t' : A give Γ + Δ ⊢ [t'/x]t : B.
inline Verdict check_linear_substitution(const TypingContext& gamma, const std::string& x, const Term& t,
                                         const TypingContext& delta, const Term& t2,
                                         const CheckOptions& opts, PropertyLog* log = nullptr) {
  auto arg = check_in_context(delta, t2, opts);
  if (!arg.ok()) return Failure{"precondition: t' does not type-check"};
  TypingContext with_x = gamma;
  with_x.add(x, Assumption::linear(*arg.type));
  auto before = check_in_context(with_x, t, opts);
  if (!before.ok()) return Failure{"precondition: t does not type-check"};
  TypingContext merged;
  try {
    merged = context_concat(gamma, delta);
  } catch (const ContextError& e) {
    return Failure{std::string("precondition: ") + e.what()};
  }
  Term result = subst(t, x, t2);
  auto after = check_in_context(merged, result, opts);
  if (!after.ok())
    return Failure{print(result) + " is ill-typed under " + merged.to_string() + ": " +
                   after.diagnostics.front().render()};
  if (!subtype(*after.type, *before.type))
    return Failure{print(result) + " : " + after.type->to_string() + ", expected " + before.type->to_string()};
  if (log && !(*after.type == *before.type)) ++log->type_changes;
  return std::nullopt;
}

// Versioned substitution, single-resource instance:
// Γ, x:[A]_r ⊢ t : B and [Δ] ⊢ t' : A give Γ + r·Δ ⊢ [t'/x]t : B.
inline Verdict check_versioned_substitution(const TypingContext& gamma, const std::string& x,
                                            const Resource& r, const Term& t, const TypingContext& delta,
                                            const Term& t2, const CheckOptions& opts,
                                            PropertyLog* log = nullptr) {
  if (!delta.all_graded()) return Failure{"precondition: Δ has linear assumptions"};
  auto arg = check_in_context(delta, t2, opts);
  if (!arg.ok()) return Failure{"precondition: t' does not type-check"};
  TypingContext with_x = gamma;
  with_x.add(x, Assumption::graded(*arg.type, r));
  auto before = check_in_context(with_x, t, opts);
  if (!before.ok()) return Failure{"precondition: t does not type-check"};
  TypingContext merged;
  try {
    merged = context_concat(gamma, context_scalar_mult(r, delta));
  } catch (const ContextError& e) {
    return Failure{std::string("precondition: ") + e.what()};
  }
  Term result = subst(t, x, t2);
  auto after = check_in_context(merged, result, opts);
  if (!after.ok())
    return Failure{print(result) + " is ill-typed under " + merged.to_string() + ": " +
                   after.diagnostics.front().render()};
  if (!subtype(*after.type, *before.type))
    return Failure{print(result) + " : " + after.type->to_string() + ", expected " + before.type->to_string()};
  if (log && !(*after.type == *before.type)) ++log->type_changes;
  return std::nullopt;
}

// Overwriting safety: [Γ] ⊢ t : A gives {l}·[Γ] ⊢ t@l : A.
inline Verdict check_overwrite_safety(const TypingContext& gamma, const Term& t, const Label& l,
                                      const CheckOptions& opts, PropertyLog* log = nullptr) {
  if (!gamma.all_graded()) return Failure{"precondition: Γ has linear assumptions"};
  auto before = check_in_context(gamma, t, opts);
  if (!before.ok()) return Failure{"precondition: t does not type-check"};
  TypingContext scaled = context_scalar_mult(Resource::single(l), gamma);
  Term result = overwrite(t, l);
  auto after = check_in_context(scaled, result, opts);
  if (!after.ok())
    return Failure{print(result) + " is ill-typed under " + scaled.to_string() + ": " +
                   after.diagnostics.front().render()};
  if (!subtype(*after.type, *before.type))
    return Failure{print(result) + " : " + after.type->to_string() + ", expected " + before.type->to_string()};
  if (log && !(*after.type == *before.type)) ++log->type_changes;
  return std::nullopt;
}

}  // namespace vl::harness
