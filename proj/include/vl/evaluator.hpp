#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vl/printer.hpp"
#include "vl/term.hpp"
#include "vl/term_ops.hpp"

namespace vl {

// t@l: makes l the default version of every versioned computation that
// offers it. Promotions and records are left alone; they carry their own
// versions.
inline Term overwrite(const Term& t, const Label& l) {
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int:
    case Term::Kind::Promote:
    case Term::Kind::Record: return t;
    case Term::Kind::Abs: {
      const auto* n = t.as<node::Abs>();
      return Term::abs(n->param, overwrite(n->body, l), t.span());
    }
    case Term::Kind::App: {
      const auto* n = t.as<node::App>();
      return Term::app(overwrite(n->fn, l), overwrite(n->arg, l), t.span());
    }
    case Term::Kind::LetBox: {
      const auto* n = t.as<node::LetBox>();
      return Term::let_box(n->name, overwrite(n->bound, l), overwrite(n->body, l), t.span());
    }
    case Term::Kind::Extract: {
      const auto* n = t.as<node::Extract>();
      return Term::extract(overwrite(n->inner, l), n->label, t.span());
    }
    case Term::Kind::Add: {
      const auto* n = t.as<node::Add>();
      return Term::add(overwrite(n->lhs, l), overwrite(n->rhs, l), t.span());
    }
    case Term::Kind::Comp: {
      const auto* n = t.as<node::Comp>();
      for (const auto& e : n->entries)
        if (e.first == l) return Term::comp(n->entries, l, t.span());
      return t;
    }
  }
  return t;
}

enum class Rule { EAbs, EClet, EEx1, EEx2, EVeri, EAdd };

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::EAbs: return "E-ABS";
    case Rule::EClet: return "E-CLET";
    case Rule::EEx1: return "E-EX1";
    case Rule::EEx2: return "E-EX2";
    case Rule::EVeri: return "E-VERI";
    case Rule::EAdd: return "E-ADD";
  }
  return "?";
}

// How E-CLET substituted the bound value.
enum class SubstKind { Box, Ver };

inline const char* to_string(SubstKind k) { return k == SubstKind::Box ? "subst-box" : "subst-ver"; }

// [v / x] t for a boxed value v: a promotion contributes its body, a
// versioned record contributes the matching versioned computation.
// Returns nullopt when v is neither.
inline std::optional<Term> subst_boxed(const Term& v, const std::string& x, const Term& t,
                                       SubstKind* kind = nullptr) {
  if (const auto* p = v.as<node::Promote>()) {
    if (kind) *kind = SubstKind::Box;
    return subst(t, x, p->body);
  }
  if (const auto* r = v.as<node::Record>()) {
    if (kind) *kind = SubstKind::Ver;
    return subst(t, x, Term::comp(r->entries, r->default_label, v.span()));
  }
  return std::nullopt;
}

struct StepResult {
  enum class Status { Stepped, Value, Stuck };

  Status status = Status::Stuck;
  Term next = Term::integer(0);  // the reduct when stepped
  Rule rule = Rule::EAbs;
  std::optional<SubstKind> subst_kind;
  std::optional<Label> overwrite_label;
  std::optional<Term> before_overwrite;  // whole term before @l was applied
  std::string reason;                    // when stuck

  bool stepped() const { return status == Status::Stepped; }
};

namespace detail {

inline StepResult stuck(std::string why) {
  StepResult r;
  r.status = StepResult::Status::Stuck;
  r.reason = std::move(why);
  return r;
}

inline StepResult stepped(Term next, Rule rule) {
  StepResult r;
  r.status = StepResult::Status::Stepped;
  r.next = std::move(next);
  r.rule = rule;
  return r;
}

// Contracts `contractum@l`.
inline StepResult stepped_overwrite(const Term& contractum, const Label& l, Rule rule) {
  StepResult r = stepped(overwrite(contractum, l), rule);
  r.overwrite_label = l;
  r.before_overwrite = contractum;
  return r;
}

// Plugs a sub-step back into its evaluation context.
inline StepResult under(StepResult inner, const std::function<Term(Term)>& plug) {
  if (!inner.stepped()) return inner;
  inner.next = plug(std::move(inner.next));
  if (inner.before_overwrite) inner.before_overwrite = plug(*inner.before_overwrite);
  return inner;
}

}  // namespace detail

// One step of lazy, leftmost reduction.
inline StepResult step(const Term& t) {
  using detail::stuck;
  using detail::stepped;
  if (t.is_value()) {
    StepResult r;
    r.status = StepResult::Status::Value;
    return r;
  }
  switch (t.kind()) {
    case Term::Kind::Var: return stuck("free variable " + t.as<node::Var>()->name);
    case Term::Kind::Comp: {
      const auto* n = t.as<node::Comp>();
      for (const auto& [l, e] : n->entries)
        if (l == n->default_label) return detail::stepped_overwrite(e, l, Rule::EVeri);
      return stuck("versioned computation without its default version");
    }
    case Term::Kind::App: {
      const auto* n = t.as<node::App>();
      if (!n->fn.is_value()) {
        Term arg = n->arg;
        Span s = t.span();
        return detail::under(step(n->fn), [&](Term f) { return Term::app(std::move(f), arg, s); });
      }
      if (const auto* f = n->fn.as<node::Abs>()) return stepped(subst(f->body, f->param, n->arg), Rule::EAbs);
      return stuck("cannot apply " + print(n->fn));
    }
    case Term::Kind::Extract: {
      const auto* n = t.as<node::Extract>();
      if (!n->inner.is_value()) {
        Label l = n->label;
        Span s = t.span();
        return detail::under(step(n->inner), [&](Term i) { return Term::extract(std::move(i), l, s); });
      }
      if (const auto* p = n->inner.as<node::Promote>())
        return detail::stepped_overwrite(p->body, n->label, Rule::EEx1);
      if (const auto* r = n->inner.as<node::Record>()) {
        for (const auto& [l, e] : r->entries)
          if (l == n->label) return detail::stepped_overwrite(e, l, Rule::EEx2);
        return stuck("record has no version " + n->label.name());
      }
      return stuck("cannot extract version " + n->label.name() + " from " + print(n->inner));
    }
    case Term::Kind::LetBox: {
      const auto* n = t.as<node::LetBox>();
      if (!n->bound.is_value()) {
        std::string x = n->name;
        Term body = n->body;
        Span s = t.span();
        return detail::under(step(n->bound),
                             [&](Term b) { return Term::let_box(x, std::move(b), body, s); });
      }
      SubstKind kind;
      auto next = subst_boxed(n->bound, n->name, n->body, &kind);
      if (!next) return stuck("let [" + n->name + "] expects a versioned value, found " + print(n->bound));
      StepResult r = stepped(std::move(*next), Rule::EClet);
      r.subst_kind = kind;
      return r;
    }
    case Term::Kind::Add: {
      const auto* n = t.as<node::Add>();
      Span s = t.span();
      if (!n->lhs.is_value()) {
        Term rhs = n->rhs;
        return detail::under(step(n->lhs), [&](Term a) { return Term::add(std::move(a), rhs, s); });
      }
      const auto* a = n->lhs.as<node::Int>();
      if (!a) return stuck("cannot add " + print(n->lhs));
      if (!n->rhs.is_value()) {
        Term lhs = n->lhs;
        return detail::under(step(n->rhs), [&](Term b) { return Term::add(lhs, std::move(b), s); });
      }
      const auto* b = n->rhs.as<node::Int>();
      if (!b) return stuck("cannot add " + print(n->rhs));
      // wrapping addition
      auto sum = static_cast<std::int64_t>(static_cast<std::uint64_t>(a->value) +
                                           static_cast<std::uint64_t>(b->value));
      return stepped(Term::integer(sum, s), Rule::EAdd);
    }
    default: break;
  }
  return stuck("no rule applies");
}

struct EvalResult {
  enum class Status { Value, Stuck, FuelExhausted };

  Status status = Status::Value;
  Term term = Term::integer(0);  // final term
  int steps = 0;
  std::string reason;

  bool ok() const { return status == Status::Value; }
};

using TraceSink = std::function<void(const Term& before, const StepResult&)>;

inline EvalResult evaluate(const Term& t, int fuel = 10000, const TraceSink& trace = {}) {
  EvalResult out;
  out.term = t;
  for (;;) {
    if (out.term.is_value()) {
      out.status = EvalResult::Status::Value;
      return out;
    }
    if (out.steps >= fuel) {
      out.status = EvalResult::Status::FuelExhausted;
      out.reason = "evaluation did not finish within " + std::to_string(fuel) + " steps";
      return out;
    }
    StepResult r = step(out.term);
    if (!r.stepped()) {
      out.status = EvalResult::Status::Stuck;
      out.reason = r.reason;
      return out;
    }
    if (trace) trace(out.term, r);
    out.term = r.next;
    ++out.steps;
  }
}

// Rule tags of one step: the rule, then how E-CLET substituted.
inline std::vector<std::string> trace_tags(const StepResult& r) {
  std::vector<std::string> tags{to_string(r.rule)};
  if (r.subst_kind) tags.emplace_back(to_string(*r.subst_kind));
  return tags;
}

// `-->[RULE] term` per step, plus `===[@l] term` after an overwrite.
inline std::vector<std::string> trace_lines(const StepResult& r) {
  std::vector<std::string> lines;
  std::string tag = to_string(r.rule);
  if (r.subst_kind) tag += std::string("/") + to_string(*r.subst_kind);
  if (r.before_overwrite) {
    lines.push_back("-->[" + tag + "] " + print(*r.before_overwrite));
    lines.push_back("===[@" + r.overwrite_label->name() + "] " + print(r.next));
  } else {
    lines.push_back("-->[" + tag + "] " + print(r.next));
  }
  return lines;
}

}  // namespace vl
