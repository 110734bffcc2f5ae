#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vl/harness/generator.hpp"
#include "vl/harness/properties.hpp"
#include "vl/harness/semiring_laws.hpp"
#include "vl/harness/shrink.hpp"

namespace vl::harness {

struct HarnessConfig {
  GenConfig gen;
  int fuel = 10000;
  int lemma_cases = 500;
};

struct PropertyReport {
  explicit PropertyReport(std::string n) : name(std::move(n)) {}

  std::string name;
  int cases = 0;
  int failures = 0;
  std::uint64_t seed = 0;
  double seconds = 0;
  std::optional<std::string> counterexample;  // first failing case, shrunk
  std::vector<std::string> notes;

  bool ok() const { return failures == 0; }

  // `name  cases=N  PASS  seed=S  (T s)`
  std::string summary() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2fs", seconds);
    std::string line = name;
    line.resize(std::max<std::size_t>(line.size() + 1, 24), ' ');
    line += "cases=" + std::to_string(cases) + "  " + (ok() ? "PASS" : "FAIL") +
            (ok() ? "" : " (" + std::to_string(failures) + ")") + "  seed=" + std::to_string(seed) +
            "  (" + buf + ")";
    return line;
  }
};

namespace detail {

// Independent, reproducible seed per case.
inline std::uint64_t case_seed(std::uint64_t seed, int i) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Generator case_generator(const GenConfig& base, int i, bool allow_comp = false) {
  GenConfig cfg = base;
  cfg.seed = case_seed(base.seed, i);
  cfg.allow_comp = allow_comp || base.allow_comp;
  return Generator(cfg);
}

inline bool is_precondition(const Failure& f) { return f.what.rfind("precondition", 0) == 0; }

// Lemmas are about derivations, so instances are checked with each
// promotion's resource pinned to the one the checker picked. Terms that do
// not check are returned unchanged for the precondition to reject.
inline Term pinned(const TypingContext& ctx, const Term& t, const CheckOptions& opts) {
  auto e = elaborate(ctx, t, opts);
  return e ? *e : t;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Records a failing case, shrinking `t` with `fails` first.
inline void record_failure(PropertyReport& rep, int i, const Term& t, const Failure& f,
                           const std::function<bool(const Term&)>& fails) {
  ++rep.failures;
  if (rep.counterexample) return;
  Term small = shrink(t, fails);
  rep.counterexample = "case " + std::to_string(i) + ": " + f.what + "\n  term:   " + print(t) +
                       "\n  shrunk: " + print(small);
}

// A small context of fresh variables named `prefix0`, `prefix1`, ...
inline TypingContext random_context(Generator& g, const std::string& prefix, bool allow_linear) {
  TypingContext ctx;
  int n = g.uniform(0, 2);
  for (int k = 0; k < n; ++k) {
    std::string x = prefix + std::to_string(k);
    Type a = g.random_type(1);
    if (allow_linear && g.chance(0.3))
      ctx.add(x, Assumption::linear(a));
    else
      ctx.add(x, Assumption::graded(a, g.random_resource(true)));
  }
  return ctx;
}

}  // namespace detail

inline PropertyReport run_semiring_laws(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport rep{"semiring-laws"};
  rep.seed = cfg.gen.seed;
  auto laws = check_semiring_laws(cfg.gen.label_universe);
  rep.cases = laws.checked;
  rep.failures = static_cast<int>(laws.failures.size());
  if (!laws.ok()) rep.counterexample = laws.failures.front().describe();
  rep.seconds = timer.seconds();
  return rep;
}

inline PropertyReport run_generator_soundness(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport rep{"generator-soundness"};
  rep.seed = cfg.gen.seed;
  CheckOptions opts{cfg.gen.label_universe};
  int built = 0, rejected = 0;
  for (int i = 0; i < cfg.gen.cases; ++i) {
    auto g = detail::case_generator(cfg.gen, i);
    ++rep.cases;
    try {
      auto t = g.closed();
      built += g.stats().built;
      rejected += g.stats().rejected;
      auto r = check_program(t.term, opts);
      if (!r.ok() || !(*r.type == t.type)) {
        ++rep.failures;
        if (!rep.counterexample) rep.counterexample = "case " + std::to_string(i) + ": " + print(t.term);
      }
    } catch (const GenerationExhausted& e) {
      ++rep.failures;
      if (!rep.counterexample) rep.counterexample = "case " + std::to_string(i) + ": " + e.what();
    }
  }
  rep.notes.push_back(std::to_string(built) + " candidates built, " + std::to_string(rejected) +
                      " refused by the checker before acceptance");
  rep.seconds = timer.seconds();
  return rep;
}

// Progress, determinism and preservation over full traces of generated
// closed terms. Returns three reports.
inline std::vector<PropertyReport> run_type_safety(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport progress{"progress"}, determinism{"determinism"}, preservation{"preservation"};
  progress.seed = determinism.seed = preservation.seed = cfg.gen.seed;
  CheckOptions opts{cfg.gen.label_universe};
  int steps = 0, changes = 0;
  for (int i = 0; i < cfg.gen.cases; ++i) {
    auto g = detail::case_generator(cfg.gen, i);
    Generated gen = g.closed();
    gen.term = detail::pinned({}, gen.term, opts);
    ++progress.cases;
    ++determinism.cases;
    ++preservation.cases;

    std::vector<Term> trace{gen.term};
    auto ev = evaluate(gen.term, cfg.fuel, [&](const Term&, const StepResult& r) { trace.push_back(r.next); });
    std::optional<Failure> pf, df;
    for (const auto& t : trace) {
      if (!pf) pf = check_progress(t);
      if (!df) df = check_determinism(t);
    }
    if (!pf && ev.status == EvalResult::Status::Stuck) pf = Failure{"stuck: " + ev.reason};
    auto closed_fails = [&](auto prop) {
      return [&opts, prop](const Term& raw) {
        Term c = detail::pinned({}, raw, opts);
        if (!check_program(c, opts).ok()) return false;
        auto v = prop(c);
        return v && !detail::is_precondition(*v);
      };
    };
    auto along_trace = [&](Verdict (*one)(const Term&)) {
      return [one, &cfg](const Term& c) -> Verdict {
        Term cur = c;
        for (int k = 0; k < cfg.fuel; ++k) {
          if (auto v = one(cur)) return v;
          auto r = step(cur);
          if (!r.stepped()) return std::nullopt;
          cur = r.next;
        }
        return std::nullopt;
      };
    };
    if (pf) detail::record_failure(progress, i, gen.term, *pf, closed_fails(along_trace(&check_progress)));
    if (df) detail::record_failure(determinism, i, gen.term, *df, closed_fails(along_trace(&check_determinism)));

    PropertyLog log;
    if (auto v = check_preservation(gen.term, opts, cfg.fuel, &log)) {
      detail::record_failure(preservation, i, gen.term, *v, closed_fails([&](const Term& c) {
                               return check_preservation(c, opts, cfg.fuel);
                             }));
    }
    steps += log.steps;
    changes += log.type_changes;
  }
  preservation.notes.push_back(std::to_string(steps) + " steps checked, " + std::to_string(changes) +
                               " of them changed the type to a proper subtype");
  double s = timer.seconds();
  progress.seconds = determinism.seconds = preservation.seconds = s;
  return {progress, determinism, preservation};
}

inline PropertyReport run_preservation_open(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport rep{"preservation-open"};
  rep.seed = cfg.gen.seed;
  CheckOptions opts{cfg.gen.label_universe};
  int steps = 0, unsubsumed = 0;
  std::vector<std::string> samples;
  for (int i = 0; i < cfg.gen.cases; ++i) {
    auto g = detail::case_generator(cfg.gen, i);
    TypingContext ctx = detail::random_context(g, "g", false);
    Generated gen = g.open(ctx);
    gen.term = detail::pinned(ctx, gen.term, opts);
    ++rep.cases;
    PropertyLog log;
    if (auto v = check_preservation_open(ctx, gen.term, opts, cfg.fuel, &log)) {
      detail::record_failure(rep, i, gen.term, *v, [&](const Term& raw) {
        Term c = detail::pinned(ctx, raw, opts);
        if (!check_in_context(ctx, c, opts).ok()) return false;
        auto w = check_preservation_open(ctx, c, opts, cfg.fuel);
        return w && !detail::is_precondition(*w);
      });
    }
    steps += log.steps;
    unsubsumed += log.unsubsumed;
    for (auto& n : log.notes)
      if (samples.size() < 3) samples.push_back("under " + ctx.to_string() + ": " + n);
  }
  rep.notes.push_back(std::to_string(steps) + " steps checked, " + std::to_string(unsubsumed) +
                      " of them left the subtype order");
  for (auto& n : samples) rep.notes.push_back(n);
  rep.seconds = timer.seconds();
  return rep;
}

inline PropertyReport run_linear_substitution(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport rep{"linear-substitution"};
  rep.seed = cfg.gen.seed;
  CheckOptions opts{cfg.gen.label_universe};
  for (int i = 0; i < cfg.lemma_cases; ++i) {
    auto g = detail::case_generator(cfg.gen, i);
    TypingContext delta = detail::random_context(g, "d", true);
    Generated arg = g.open(delta);
    arg.term = detail::pinned(delta, arg.term, opts);
    TypingContext gamma = detail::random_context(g, "g", true);
    TypingContext with_x = gamma;
    with_x.add("s", Assumption::linear(arg.type));
    Generated body = g.open(with_x);
    body.term = detail::pinned(with_x, body.term, opts);
    ++rep.cases;
    auto fails = [&](const Term& raw) {
      Term c = detail::pinned(with_x, raw, opts);
      auto v = check_linear_substitution(gamma, "s", c, delta, arg.term, opts);
      return v && !detail::is_precondition(*v);
    };
    if (auto v = check_linear_substitution(gamma, "s", body.term, delta, arg.term, opts))
      detail::record_failure(rep, i, body.term, *v, fails);
  }
  rep.seconds = timer.seconds();
  return rep;
}

inline PropertyReport run_versioned_substitution(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport rep{"versioned-substitution"};
  rep.seed = cfg.gen.seed;
  CheckOptions opts{cfg.gen.label_universe};
  for (int i = 0; i < cfg.lemma_cases; ++i) {
    auto g = detail::case_generator(cfg.gen, i);
    TypingContext delta = detail::random_context(g, "d", false);
    Generated arg = g.open(delta);
    arg.term = detail::pinned(delta, arg.term, opts);
    TypingContext gamma = detail::random_context(g, "g", true);
    Resource r = g.random_resource(true);
    TypingContext with_x = gamma;
    with_x.add("s", Assumption::graded(arg.type, r));
    Generated body = g.open(with_x);
    body.term = detail::pinned(with_x, body.term, opts);
    ++rep.cases;
    auto fails = [&](const Term& raw) {
      Term c = detail::pinned(with_x, raw, opts);
      auto v = check_versioned_substitution(gamma, "s", r, c, delta, arg.term, opts);
      return v && !detail::is_precondition(*v);
    };
    if (auto v = check_versioned_substitution(gamma, "s", r, body.term, delta, arg.term, opts))
      detail::record_failure(rep, i, body.term, *v, fails);
  }
  rep.seconds = timer.seconds();
  return rep;
}

// Each generated instance is checked at every label of the universe.
inline PropertyReport run_overwrite_safety(const HarnessConfig& cfg) {
  detail::Timer timer;
  PropertyReport rep{"overwrite-safety"};
  rep.seed = cfg.gen.seed;
  CheckOptions opts{cfg.gen.label_universe};
  int changed = 0;
  for (int i = 0; i < cfg.lemma_cases; ++i) {
    auto g = detail::case_generator(cfg.gen, i, true);
    TypingContext gamma = detail::random_context(g, "g", false);
    Generated gen = g.open(gamma);
    gen.term = detail::pinned(gamma, gen.term, opts);
    for (const auto& l : cfg.gen.label_universe) {
      ++rep.cases;
      if (!(overwrite(gen.term, l) == gen.term)) ++changed;
      auto fails = [&](const Term& raw) {
        Term c = detail::pinned(gamma, raw, opts);
        auto v = check_overwrite_safety(gamma, c, l, opts);
        return v && !detail::is_precondition(*v);
      };
      if (auto v = check_overwrite_safety(gamma, gen.term, l, opts))
        detail::record_failure(rep, i, gen.term, *v, fails);
    }
  }
  rep.notes.push_back(std::to_string(changed) + " of the instances were changed by overwriting");
  rep.seconds = timer.seconds();
  return rep;
}

inline std::vector<PropertyReport> run_all(const HarnessConfig& cfg) {
  std::vector<PropertyReport> out;
  out.push_back(run_semiring_laws(cfg));
  out.push_back(run_generator_soundness(cfg));
  for (auto& r : run_type_safety(cfg)) out.push_back(std::move(r));
  out.push_back(run_preservation_open(cfg));
  out.push_back(run_linear_substitution(cfg));
  out.push_back(run_versioned_substitution(cfg));
  out.push_back(run_overwrite_safety(cfg));
  return out;
}

}  // namespace vl::harness
