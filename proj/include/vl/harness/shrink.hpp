#pragma once

#include <cstdint>
#include <functional>
#include <tuple>
#include <vector>

#include "vl/term.hpp"
#include "vl/term_ops.hpp"

namespace vl::harness {

namespace detail {

// Lexicographic size used to make shrinking terminate.
inline std::tuple<int, std::uint64_t, int> weight(const Term& t) {
  std::uint64_t ints = 0;
  int annotations = 0;
  for (const auto& s : subterms(t)) {
    if (const auto* n = s.as<node::Int>()) {
      auto v = static_cast<std::uint64_t>(n->value);
      ints += n->value < 0 ? 0 - v : v;
    }
    if (const auto* p = s.as<node::Promote>(); p && p->annotation) ++annotations;
  }
  return {term_size(t), ints, annotations};
}

inline std::vector<Term> local_candidates(const Term& s) {
  std::vector<Term> out;
  for (const auto& c : children(s)) out.push_back(c);
  if (const auto* n = s.as<node::Int>()) {
    if (n->value != 0) out.push_back(Term::integer(0));
    if (n->value / 2 != 0) out.push_back(Term::integer(n->value / 2));
  } else {
    out.push_back(Term::integer(0));
  }
  if (const auto* p = s.as<node::Promote>(); p && p->annotation) out.push_back(Term::promote(p->body));
  auto drop_entries = [&](const Entries& es, const Label& def, bool record) {
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (es[i].first == def) continue;
      Entries fewer = es;
      fewer.erase(fewer.begin() + static_cast<long>(i));
      out.push_back(record ? Term::record(fewer, def) : Term::comp(fewer, def));
    }
  };
  if (const auto* r = s.as<node::Record>()) drop_entries(r->entries, r->default_label, true);
  if (const auto* c = s.as<node::Comp>()) drop_entries(c->entries, c->default_label, false);
  return out;
}

}  // namespace detail

// Greedy shrinking: repeatedly takes the first strictly smaller candidate
// that still satisfies `still_fails` (which must also re-check typing).
inline Term shrink(Term t, const std::function<bool(const Term&)>& still_fails, int max_rounds = 200) {
  for (int round = 0; round < max_rounds; ++round) {
    bool improved = false;
    auto subs = subterms(t);
    auto w = detail::weight(t);
    for (int i = 0; i < static_cast<int>(subs.size()) && !improved; ++i) {
      for (const auto& c : detail::local_candidates(subs[static_cast<std::size_t>(i)])) {
        Term candidate = replace_at(t, i, c);
        if (!(detail::weight(candidate) < w)) continue;
        if (!still_fails(candidate)) continue;
        t = candidate;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return t;
}

}  // namespace vl::harness
