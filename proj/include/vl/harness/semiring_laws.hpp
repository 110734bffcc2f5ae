#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vl/resource.hpp"

namespace vl::harness {

struct Law {
  std::string name;
  int arity;  // 1, 2 or 3
  std::function<bool(const Resource&, const Resource&, const Resource&)> holds;
};

inline const std::vector<Law>& semiring_laws() {
  using R = const Resource&;
  static const std::vector<Law> laws = {
      {"plus associative", 3, [](R p, R q, R r) { return plus(plus(p, q), r) == plus(p, plus(q, r)); }},
      {"plus commutative", 2, [](R p, R q, R) { return plus(p, q) == plus(q, p); }},
      {"plus identity bottom", 1,
       [](R p, R, R) { return plus(Resource::bottom(), p) == p && plus(p, Resource::bottom()) == p; }},
      {"times associative", 3,
       [](R p, R q, R r) { return times(times(p, q), r) == times(p, times(q, r)); }},
      {"times identity empty", 1,
       [](R p, R, R) { return times(Resource::empty(), p) == p && times(p, Resource::empty()) == p; }},
      {"times distributes left", 3,
       [](R p, R q, R r) { return times(r, plus(p, q)) == plus(times(r, p), times(r, q)); }},
      {"times distributes right", 3,
       [](R p, R q, R r) { return times(plus(p, q), r) == plus(times(p, r), times(q, r)); }},
      {"bottom absorbs times", 1,
       [](R p, R, R) {
         return times(p, Resource::bottom()).is_bottom() && times(Resource::bottom(), p).is_bottom();
       }},
      {"leq reflexive", 1, [](R p, R, R) { return leq(p, p); }},
      {"leq antisymmetric", 2, [](R p, R q, R) { return !(leq(p, q) && leq(q, p)) || p == q; }},
      {"leq transitive", 3, [](R p, R q, R r) { return !(leq(p, q) && leq(q, r)) || leq(p, r); }},
      {"bottom least", 1, [](R p, R, R) { return leq(Resource::bottom(), p); }},
      {"plus is upper bound", 2, [](R p, R q, R) { return leq(p, plus(p, q)) && leq(q, plus(p, q)); }},
      {"plus is least upper bound", 3,
       [](R p, R q, R r) { return !(leq(p, r) && leq(q, r)) || leq(plus(p, q), r); }},
      {"plus monotone", 3, [](R p, R q, R r) { return !leq(p, q) || leq(plus(p, r), plus(q, r)); }},
      {"times monotone", 3, [](R p, R q, R r) { return !leq(p, q) || leq(times(p, r), times(q, r)); }},
      {"plus idempotent", 1, [](R p, R, R) { return plus(p, p) == p; }},
  };
  return laws;
}

struct LawFailure {
  std::string law;
  std::vector<Resource> witness;

  std::string describe() const {
    std::string out = law + " fails at (";
    for (std::size_t i = 0; i < witness.size(); ++i) out += (i ? ", " : "") + witness[i].to_string();
    return out + ")";
  }
};

struct LawReport {
  int checked = 0;  // law instances evaluated
  std::vector<LawFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Every law over every tuple of resources drawn from the universe.
inline LawReport check_semiring_laws(const std::set<Label>& universe) {
  auto rs = all_resources(std::vector<Label>(universe.begin(), universe.end()));
  LawReport report;
  for (const auto& law : semiring_laws()) {
    std::size_t nq = law.arity >= 2 ? rs.size() : 1;
    std::size_t nr = law.arity >= 3 ? rs.size() : 1;
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < nq; ++j)
        for (std::size_t k = 0; k < nr; ++k) {
          ++report.checked;
          const Resource& p = rs[i];
          const Resource& q = rs[j];
          const Resource& r = rs[k];
          if (law.holds(p, q, r)) continue;
          std::vector<Resource> w{p, q, r};
          w.resize(static_cast<std::size_t>(law.arity));
          report.failures.push_back({law.name, std::move(w)});
        }
  }
  return report;
}

}  // namespace vl::harness
