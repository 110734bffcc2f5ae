#pragma once

#include <set>
#include <string>
#include <vector>

#include "vl/term.hpp"

namespace vl {

namespace detail {

inline void collect_free(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
  auto under = [&](const std::string& x, const Term& body) {
    bool fresh = bound.insert(x).second;
    collect_free(body, bound, out);
    if (fresh) bound.erase(x);
  };
  switch (t.kind()) {
    case Term::Kind::Var: {
      const auto& x = t.as<node::Var>()->name;
      if (!bound.count(x)) out.insert(x);
      return;
    }
    case Term::Kind::Int: return;
    case Term::Kind::App:
      collect_free(t.as<node::App>()->fn, bound, out);
      collect_free(t.as<node::App>()->arg, bound, out);
      return;
    case Term::Kind::Add:
      collect_free(t.as<node::Add>()->lhs, bound, out);
      collect_free(t.as<node::Add>()->rhs, bound, out);
      return;
    case Term::Kind::Abs: under(t.as<node::Abs>()->param, t.as<node::Abs>()->body); return;
    case Term::Kind::LetBox: {
      const auto* n = t.as<node::LetBox>();
      collect_free(n->bound, bound, out);
      under(n->name, n->body);
      return;
    }
    case Term::Kind::Promote: collect_free(t.as<node::Promote>()->body, bound, out); return;
    case Term::Kind::Extract: collect_free(t.as<node::Extract>()->inner, bound, out); return;
    case Term::Kind::Record:
      for (const auto& e : t.as<node::Record>()->entries) collect_free(e.second, bound, out);
      return;
    case Term::Kind::Comp:
      for (const auto& e : t.as<node::Comp>()->entries) collect_free(e.second, bound, out);
      return;
  }
}

inline void collect_labels(const Term& t, std::set<Label>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int: return;
    case Term::Kind::App:
      collect_labels(t.as<node::App>()->fn, out);
      collect_labels(t.as<node::App>()->arg, out);
      return;
    case Term::Kind::Add:
      collect_labels(t.as<node::Add>()->lhs, out);
      collect_labels(t.as<node::Add>()->rhs, out);
      return;
    case Term::Kind::Abs: collect_labels(t.as<node::Abs>()->body, out); return;
    case Term::Kind::LetBox:
      collect_labels(t.as<node::LetBox>()->bound, out);
      collect_labels(t.as<node::LetBox>()->body, out);
      return;
    case Term::Kind::Promote: {
      const auto* n = t.as<node::Promote>();
      if (n->annotation)
        for (const auto& l : n->annotation->labels()) out.insert(l);
      collect_labels(n->body, out);
      return;
    }
    case Term::Kind::Extract:
      out.insert(t.as<node::Extract>()->label);
      collect_labels(t.as<node::Extract>()->inner, out);
      return;
    case Term::Kind::Record:
      for (const auto& [l, e] : t.as<node::Record>()->entries) {
        out.insert(l);
        collect_labels(e, out);
      }
      return;
    case Term::Kind::Comp:
      for (const auto& [l, e] : t.as<node::Comp>()->entries) {
        out.insert(l);
        collect_labels(e, out);
      }
      return;
  }
}

}  // namespace detail

inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> bound, out;
  detail::collect_free(t, bound, out);
  return out;
}

// Every label mentioned by records, computations, extractions and
// promotion annotations.
inline std::set<Label> label_universe(const Term& t) {
  std::set<Label> out;
  detail::collect_labels(t, out);
  return out;
}

// `x` primed until it avoids everything in `avoid`.
inline std::string fresh_name(std::string x, const std::set<std::string>& avoid) {
  while (avoid.count(x)) x += '\'';
  return x;
}

namespace detail {

class Substituter {
 public:
  Substituter(const std::string& x, const Term& replacement)
      : x_(x), replacement_(replacement), replacement_fv_(free_vars(replacement)) {}

  Term run(const Term& t) const {
    switch (t.kind()) {
      case Term::Kind::Var: return t.as<node::Var>()->name == x_ ? replacement_ : t;
      case Term::Kind::Int: return t;
      case Term::Kind::App: {
        const auto* n = t.as<node::App>();
        return Term::app(run(n->fn), run(n->arg), t.span());
      }
      case Term::Kind::Add: {
        const auto* n = t.as<node::Add>();
        return Term::add(run(n->lhs), run(n->rhs), t.span());
      }
      case Term::Kind::Abs: {
        const auto* n = t.as<node::Abs>();
        auto [y, body] = binder(n->param, n->body);
        return Term::abs(std::move(y), std::move(body), t.span());
      }
      case Term::Kind::LetBox: {
        const auto* n = t.as<node::LetBox>();
        auto [y, body] = binder(n->name, n->body);
        return Term::let_box(std::move(y), run(n->bound), std::move(body), t.span());
      }
      case Term::Kind::Promote: {
        const auto* n = t.as<node::Promote>();
        return Term::promote(run(n->body), n->annotation, t.span());
      }
      case Term::Kind::Extract: {
        const auto* n = t.as<node::Extract>();
        return Term::extract(run(n->inner), n->label, t.span());
      }
      case Term::Kind::Record: {
        const auto* n = t.as<node::Record>();
        return Term::record(entries(n->entries), n->default_label, t.span());
      }
      case Term::Kind::Comp: {
        const auto* n = t.as<node::Comp>();
        return Term::comp(entries(n->entries), n->default_label, t.span());
      }
    }
    return t;
  }

 private:
  Entries entries(const Entries& es) const {
    Entries out;
    out.reserve(es.size());
    for (const auto& [l, e] : es) out.emplace_back(l, run(e));
    return out;
  }

  // Substitutes under binder y, renaming y when it would capture a free
  // variable of the replacement.
  std::pair<std::string, Term> binder(const std::string& y, const Term& body) const {
    if (y == x_) return {y, body};
    if (!replacement_fv_.count(y)) return {y, run(body)};
    auto avoid = replacement_fv_;
    auto body_fv = free_vars(body);
    avoid.insert(body_fv.begin(), body_fv.end());
    avoid.insert(x_);
    std::string z = fresh_name(y, avoid);
    Term renamed = Substituter(y, Term::var(z)).run(body);
    return {z, run(renamed)};
  }

  const std::string& x_;
  const Term& replacement_;
  std::set<std::string> replacement_fv_;
};

}  // namespace detail

// Capture-avoiding [replacement / x] t.
inline Term subst(const Term& t, const std::string& x, const Term& replacement) {
  return detail::Substituter(x, replacement).run(t);
}

// Syntactic depth; leaves have depth 1.
inline int term_depth(const Term& t) {
  auto d = [](const Term& u) { return term_depth(u); };
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int: return 1;
    case Term::Kind::App: return 1 + std::max(d(t.as<node::App>()->fn), d(t.as<node::App>()->arg));
    case Term::Kind::Add: return 1 + std::max(d(t.as<node::Add>()->lhs), d(t.as<node::Add>()->rhs));
    case Term::Kind::Abs: return 1 + d(t.as<node::Abs>()->body);
    case Term::Kind::LetBox:
      return 1 + std::max(d(t.as<node::LetBox>()->bound), d(t.as<node::LetBox>()->body));
    case Term::Kind::Promote: return 1 + d(t.as<node::Promote>()->body);
    case Term::Kind::Extract: return 1 + d(t.as<node::Extract>()->inner);
    case Term::Kind::Record:
    case Term::Kind::Comp: {
      const auto& es = t.kind() == Term::Kind::Record ? t.as<node::Record>()->entries
                                                      : t.as<node::Comp>()->entries;
      int m = 0;
      for (const auto& e : es) m = std::max(m, d(e.second));
      return 1 + m;
    }
  }
  return 1;
}

// Node count.
inline int term_size(const Term& t) {
  auto s = [](const Term& u) { return term_size(u); };
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int: return 1;
    case Term::Kind::App: return 1 + s(t.as<node::App>()->fn) + s(t.as<node::App>()->arg);
    case Term::Kind::Add: return 1 + s(t.as<node::Add>()->lhs) + s(t.as<node::Add>()->rhs);
    case Term::Kind::Abs: return 1 + s(t.as<node::Abs>()->body);
    case Term::Kind::LetBox:
      return 1 + s(t.as<node::LetBox>()->bound) + s(t.as<node::LetBox>()->body);
    case Term::Kind::Promote: return 1 + s(t.as<node::Promote>()->body);
    case Term::Kind::Extract: return 1 + s(t.as<node::Extract>()->inner);
    case Term::Kind::Record:
    case Term::Kind::Comp: {
      const auto& es = t.kind() == Term::Kind::Record ? t.as<node::Record>()->entries
                                                      : t.as<node::Comp>()->entries;
      int n = 1;
      for (const auto& e : es) n += s(e.second);
      return n;
    }
  }
  return 1;
}

// Immediate subterms, left to right.
inline std::vector<Term> children(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int: return {};
    case Term::Kind::App: return {t.as<node::App>()->fn, t.as<node::App>()->arg};
    case Term::Kind::Add: return {t.as<node::Add>()->lhs, t.as<node::Add>()->rhs};
    case Term::Kind::Abs: return {t.as<node::Abs>()->body};
    case Term::Kind::LetBox: return {t.as<node::LetBox>()->bound, t.as<node::LetBox>()->body};
    case Term::Kind::Promote: return {t.as<node::Promote>()->body};
    case Term::Kind::Extract: return {t.as<node::Extract>()->inner};
    case Term::Kind::Record:
    case Term::Kind::Comp: {
      const auto& es = t.kind() == Term::Kind::Record ? t.as<node::Record>()->entries
                                                      : t.as<node::Comp>()->entries;
      std::vector<Term> out;
      for (const auto& e : es) out.push_back(e.second);
      return out;
    }
  }
  return {};
}

// `t` with its immediate subterms replaced, in `children` order.
inline Term with_children(const Term& t, const std::vector<Term>& cs) {
  auto entries = [&](const Entries& es) {
    Entries out;
    for (std::size_t i = 0; i < es.size(); ++i) out.emplace_back(es[i].first, cs[i]);
    return out;
  };
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int: return t;
    case Term::Kind::App: return Term::app(cs[0], cs[1], t.span());
    case Term::Kind::Add: return Term::add(cs[0], cs[1], t.span());
    case Term::Kind::Abs: return Term::abs(t.as<node::Abs>()->param, cs[0], t.span());
    case Term::Kind::LetBox: return Term::let_box(t.as<node::LetBox>()->name, cs[0], cs[1], t.span());
    case Term::Kind::Promote: return Term::promote(cs[0], t.as<node::Promote>()->annotation, t.span());
    case Term::Kind::Extract: return Term::extract(cs[0], t.as<node::Extract>()->label, t.span());
    case Term::Kind::Record: {
      const auto* n = t.as<node::Record>();
      return Term::record(entries(n->entries), n->default_label, t.span());
    }
    case Term::Kind::Comp: {
      const auto* n = t.as<node::Comp>();
      return Term::comp(entries(n->entries), n->default_label, t.span());
    }
  }
  return t;
}

// Every subterm in pre-order; `replace_at` uses the same numbering.
inline std::vector<Term> subterms(const Term& t) {
  std::vector<Term> out{t};
  for (const auto& c : children(t)) {
    auto sub = subterms(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

inline Term replace_at(const Term& t, int index, const Term& replacement) {
  if (index == 0) return replacement;
  --index;
  auto cs = children(t);
  for (auto& c : cs) {
    int n = term_size(c);
    if (index < n) {
      c = replace_at(c, index, replacement);
      return with_children(t, cs);
    }
    index -= n;
  }
  return t;
}

// Drops every promotion annotation.
inline Term erase_annotations(const Term& t) {
  auto cs = children(t);
  for (auto& c : cs) c = erase_annotations(c);
  if (t.kind() == Term::Kind::Promote) return Term::promote(cs[0], std::nullopt, t.span());
  return with_children(t, cs);
}

}  // namespace vl
