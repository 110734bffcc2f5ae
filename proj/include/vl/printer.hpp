#pragma once

#include <string>

#include "vl/term.hpp"

namespace vl {

namespace detail {

// Binding strength of the context a term is printed in.
enum Prec : int { kTerm = 0, kSum = 1, kApp = 2, kPostfix = 3, kAtom = 4 };

inline std::string print_at(const Term& t, int prec);

inline std::string print_entries(const Entries& es, const Label& def) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ", ";
    out += es[i].first.name() + " = " + print_at(es[i].second, kTerm);
  }
  return out + " | " + def.name();
}

inline std::string parens_if(bool cond, std::string s) { return cond ? "(" + s + ")" : s; }

inline std::string print_at(const Term& t, int prec) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.as<node::Var>()->name;
    case Term::Kind::Int: return std::to_string(t.as<node::Int>()->value);
    case Term::Kind::Abs: {
      const auto* n = t.as<node::Abs>();
      return parens_if(prec > kTerm, "\\" + n->param + ". " + print_at(n->body, kTerm));
    }
    case Term::Kind::LetBox: {
      const auto* n = t.as<node::LetBox>();
      return parens_if(prec > kTerm, "let [" + n->name + "] = " + print_at(n->bound, kTerm) +
                                         " in " + print_at(n->body, kTerm));
    }
    case Term::Kind::Add: {
      const auto* n = t.as<node::Add>();
      return parens_if(prec > kSum, print_at(n->lhs, kSum) + " + " + print_at(n->rhs, kApp));
    }
    case Term::Kind::App: {
      const auto* n = t.as<node::App>();
      return parens_if(prec > kApp, print_at(n->fn, kApp) + " " + print_at(n->arg, kPostfix));
    }
    case Term::Kind::Extract: {
      // The inner term is printed as an atom: `x.a.b` would lex as the
      // single label `a.b`.
      const auto* n = t.as<node::Extract>();
      return parens_if(prec > kPostfix, print_at(n->inner, kAtom) + "." + n->label.name());
    }
    case Term::Kind::Promote: {
      const auto* n = t.as<node::Promote>();
      std::string out = "[" + print_at(n->body, kTerm) + "]";
      if (n->annotation) out += "@" + n->annotation->to_string();
      return out;
    }
    case Term::Kind::Record: {
      const auto* n = t.as<node::Record>();
      return "{" + print_entries(n->entries, n->default_label) + "}";
    }
    case Term::Kind::Comp: {
      const auto* n = t.as<node::Comp>();
      return "<" + print_entries(n->entries, n->default_label) + ">";
    }
  }
  return "?";
}

}  // namespace detail

// Concrete syntax accepted by `parse`; versioned computations print as
// `<l1 = t, ... | l>`, which only the intermediate-form parser accepts.
inline std::string print(const Term& t) { return detail::print_at(t, detail::kTerm); }

}  // namespace vl
