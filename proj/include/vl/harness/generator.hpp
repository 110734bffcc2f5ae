#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vl/context.hpp"
#include "vl/resource.hpp"
#include "vl/term.hpp"
#include "vl/term_ops.hpp"
#include "vl/type.hpp"
#include "vl/typechecker.hpp"

namespace vl::harness {

struct GenConfig {
  int max_depth = 5;
  std::set<Label> label_universe{Label("l1"), Label("l2"), Label("l3")};
  std::vector<std::int64_t> int_pool{0, 1, 2, 3};
  std::uint64_t seed = 42;
  int cases = 1000;
  bool allow_comp = false;     // emit versioned computations
  double strip_annotation = 0.3;  // chance to drop a promotion annotation that is not needed
};

class GenerationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Generated {
  Term term;
  Type type;
};

// Builds well-typed terms top-down from a target type, picking a typing
// rule at each node. Linear variables are threaded as obligations that
// must be consumed exactly once; graded variables are usable wherever the
// enclosing promotions and record entries fit their availability.
class Generator {
 public:
  explicit Generator(GenConfig cfg)
      : cfg_(std::move(cfg)),
        rng_(cfg_.seed),
        labels_(cfg_.label_universe.begin(), cfg_.label_universe.end()) {
    if (cfg_.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
    if (labels_.empty()) throw std::invalid_argument("label universe must not be empty");
    if (cfg_.int_pool.empty()) cfg_.int_pool = {0};
  }

  // Candidates built by the rules, and how many of those the checker
  // refused (a nonzero count points at a generator/checker disagreement).
  struct Stats {
    int built = 0;
    int rejected = 0;
  };

  const Stats& stats() const { return stats_; }
  std::mt19937_64& rng() { return rng_; }
  const GenConfig& config() const { return cfg_; }

  // A closed term; the reported type is the checker's.
  Generated closed(const std::optional<Type>& target = std::nullopt, int attempts = 200) {
    return open(TypingContext{}, target, attempts);
  }

  // A term typed under `ctx` that uses each linear assumption exactly once.
  Generated open(const TypingContext& ctx, const std::optional<Type>& target = std::nullopt,
                 int attempts = 200) {
    CheckOptions opts{cfg_.label_universe};
    for (int i = 0; i < attempts; ++i) {
      env_.clear();
      std::vector<std::string> obligations;
      for (const auto& [x, a] : ctx.entries()) {
        env_.push_back({x, a.type, a.is_linear(), a.grade});
        if (a.is_linear()) obligations.push_back(x);
      }
      counter_ = 0;
      budget_ = 4000;
      Type want = target ? *target : random_type(2);
      auto t = gen(want, cfg_.max_depth, obligations, Resource::empty());
      if (!t) continue;
      ++stats_.built;
      auto r = check_in_context(ctx, *t, opts);
      if (!r.ok()) {
        ++stats_.rejected;
        continue;
      }
      if (target && !(*r.type == *target)) continue;
      Term stripped = strip(ctx, *t, *r.type, opts);
      return {stripped, *r.type};
    }
    throw GenerationExhausted("no term fits within depth " + std::to_string(cfg_.max_depth) +
                              " under " + ctx.to_string() +
                              (target ? " at type " + target->to_string() : std::string()));
  }

  Type random_type(int depth) {
    int pick = uniform(0, depth > 1 ? 9 : 5);
    if (pick <= 4) return Type::integer();
    if (pick <= 6 || depth <= 1) return Type::box(random_resource(false), Type::integer());
    if (pick == 7) return Type::arrow(Type::integer(), Type::integer());
    if (pick == 8) return Type::box(random_resource(false), random_type(depth - 1));
    return Type::arrow(random_type(depth - 1), random_type(depth - 1));
  }

  // A random resource over the universe; ⊥ only when allowed.
  Resource random_resource(bool allow_bottom) {
    if (allow_bottom && chance(0.08)) return Resource::bottom();
    std::vector<Label> ls;
    for (const auto& l : labels_)
      if (chance(0.5)) ls.push_back(l);
    if (ls.empty() && chance(0.7)) ls.push_back(pick(labels_));
    return Resource::of(std::move(ls));
  }

  Label random_label() { return pick(labels_); }

  std::int64_t random_int() { return pick(cfg_.int_pool); }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  struct Var {
    std::string name;
    Type type;
    bool linear;
    Resource avail;
  };

  enum class Rule { LinearVar, GradedVar, Lit, Add, Abs, Promote, Record, Comp, App, Let, Extract };

  std::string fresh(const char* stem) { return stem + std::to_string(counter_++); }

  const Var* find(const std::string& x) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->name == x) return &*it;
    return nullptr;
  }

  // Usually one of the obligations whose type fits, so that it can be
  // consumed by an elimination form.
  template <class Pred>
  const Var* eliminable(const std::vector<std::string>& o, Pred fits) {
    std::vector<const Var*> ok;
    for (const auto& x : o)
      if (const Var* v = find(x); v && fits(v->type)) ok.push_back(v);
    if (ok.empty() || !chance(0.7)) return nullptr;
    return pick(ok);
  }

  static std::vector<std::string> without(const std::vector<std::string>& o, const std::string& x) {
    std::vector<std::string> out;
    for (const auto& y : o)
      if (y != x) out.push_back(y);
    return out;
  }

  std::pair<std::vector<std::string>, std::vector<std::string>> split(
      const std::vector<std::string>& o) {
    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    for (const auto& x : o) (chance(0.5) ? out.first : out.second).push_back(x);
    return out;
  }

  std::vector<Rule> plan(const Type& t, int depth, bool linear_free) {
    std::vector<std::pair<Rule, int>> weighted;
    weighted.push_back({Rule::LinearVar, 40});
    weighted.push_back({Rule::GradedVar, 45});
    if (t.is_int()) weighted.push_back({Rule::Lit, depth <= 2 ? 30 : 6});
    if (depth >= 2) {
      if (t.is_int()) weighted.push_back({Rule::Add, 8});
      if (t.is_arrow()) weighted.push_back({Rule::Abs, 30});
      if (t.is_box() && linear_free) {
        weighted.push_back({Rule::Promote, 20});
        if (!t.resource().is_bottom() && !t.resource().labels().empty())
          weighted.push_back({Rule::Record, 20});
      }
      if (cfg_.allow_comp && linear_free) weighted.push_back({Rule::Comp, 6});
      if (depth >= 3) {
        weighted.push_back({Rule::App, 10});
        weighted.push_back({Rule::Let, 14});
        weighted.push_back({Rule::Extract, 10});
      }
    }
    // weighted shuffle
    std::vector<Rule> order;
    while (!weighted.empty()) {
      int total = 0;
      for (const auto& w : weighted) total += w.second;
      int roll = uniform(0, total - 1);
      std::size_t i = 0;
      for (; roll >= weighted[i].second; ++i) roll -= weighted[i].second;
      order.push_back(weighted[i].first);
      weighted.erase(weighted.begin() + static_cast<long>(i));
    }
    return order;
  }

  std::optional<Term> gen(const Type& t, int depth, const std::vector<std::string>& o,
                          const Resource& region) {
    if (depth < 1 || --budget_ < 0) return std::nullopt;
    for (Rule rule : plan(t, depth, o.empty())) {
      if (auto r = apply(rule, t, depth, o, region)) return r;
      if (budget_ < 0) return std::nullopt;
    }
    return std::nullopt;
  }

  std::optional<Term> apply(Rule rule, const Type& t, int depth, const std::vector<std::string>& o,
                            const Resource& region) {
    switch (rule) {
      case Rule::LinearVar: {
        if (o.size() != 1) return std::nullopt;
        const Var* v = find(o[0]);
        if (!v || !(v->type == t)) return std::nullopt;
        return Term::var(v->name);
      }
      case Rule::GradedVar: {
        if (!o.empty()) return std::nullopt;
        std::vector<std::string> usable;
        std::set<std::string> seen;
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
          if (!seen.insert(it->name).second) continue;
          if (!it->linear && it->type == t && leq(region, it->avail)) usable.push_back(it->name);
        }
        if (usable.empty()) return std::nullopt;
        return Term::var(pick(usable));
      }
      case Rule::Lit:
        if (!o.empty()) return std::nullopt;
        return Term::integer(random_int());
      case Rule::Add: {
        auto [lo, ro] = split(o);
        auto lhs = gen(Type::integer(), depth - 1, lo, region);
        if (!lhs) return std::nullopt;
        auto rhs = gen(Type::integer(), depth - 1, ro, region);
        if (!rhs) return std::nullopt;
        return Term::add(*lhs, *rhs);
      }
      case Rule::Abs: {
        std::string y = fresh("x");
        env_.push_back({y, t.param(), true, Resource{}});
        auto o2 = o;
        o2.push_back(y);
        auto body = gen(t.result(), depth - 1, o2, region);
        env_.pop_back();
        if (!body) return std::nullopt;
        return Term::abs(y, *body);
      }
      case Rule::Promote: {
        const Resource& r = t.resource();
        auto body = gen(t.inner(), depth - 1, {}, times(region, r));
        if (!body) return std::nullopt;
        return Term::promote(*body, r);
      }
      case Rule::Record: {
        Entries es;
        for (const auto& l : t.resource().labels()) {
          auto e = gen(t.inner(), depth - 1, {}, times(region, Resource::single(l)));
          if (!e) return std::nullopt;
          es.emplace_back(l, *e);
        }
        Label def = es[static_cast<std::size_t>(uniform(0, static_cast<int>(es.size()) - 1))].first;
        return Term::record(std::move(es), def);
      }
      case Rule::Comp: {
        Resource ls = random_resource(false);
        if (ls.labels().empty()) ls = Resource::single(random_label());
        Entries es;
        for (const auto& l : ls.labels()) {
          auto e = gen(t, depth - 1, {}, times(region, Resource::single(l)));
          if (!e) return std::nullopt;
          es.emplace_back(l, *e);
        }
        Label def = es[static_cast<std::size_t>(uniform(0, static_cast<int>(es.size()) - 1))].first;
        return Term::comp(std::move(es), def);
      }
      case Rule::App: {
        Type s = random_type(depth >= 4 ? 2 : 1);
        auto [fo, ao] = split(o);
        if (const Var* v = eliminable(o, [&](const Type& a) { return a.is_arrow() && a.result() == t; })) {
          s = v->type.param();
          fo = {v->name};
          ao = without(o, v->name);
        }
        auto fn = gen(Type::arrow(s, t), depth - 1, fo, region);
        if (!fn) return std::nullopt;
        auto arg = gen(s, depth - 1, ao, region);
        if (!arg) return std::nullopt;
        return Term::app(*fn, *arg);
      }
      case Rule::Let: {
        Resource s = random_resource(true);
        Type inner = chance(0.7) ? Type::integer() : random_type(1);
        auto [bo, co] = split(o);
        if (const Var* v = eliminable(o, [](const Type& a) { return a.is_box(); })) {
          s = v->type.resource();
          inner = v->type.inner();
          bo = {v->name};
          co = without(o, v->name);
        }
        auto bound = gen(Type::box(s, inner), depth - 1, bo, region);
        if (!bound) return std::nullopt;
        std::string z = fresh("y");
        env_.push_back({z, inner, false, s});
        auto body = gen(t, depth - 1, co, region);
        env_.pop_back();
        if (!body) return std::nullopt;
        return Term::let_box(z, *bound, *body);
      }
      case Rule::Extract: {
        Label l = random_label();
        Resource r = plus(Resource::single(l), random_resource(false));
        if (const Var* v = eliminable(o, [&](const Type& a) {
              return a.is_box() && a.inner() == t && !a.resource().is_bottom() && !a.resource().labels().empty();
            });
            v && o.size() == 1) {
          r = v->type.resource();
          l = pick(r.labels());
        }
        auto inner = gen(Type::box(r, t), depth - 1, o, region);
        if (!inner) return std::nullopt;
        return Term::extract(*inner, l);
      }
    }
    return std::nullopt;
  }

  // Drops promotion annotations the checker can do without, keeping the
  // term's type unchanged.
  Term strip(const TypingContext& ctx, Term t, const Type& type, const CheckOptions& opts) {
    if (cfg_.strip_annotation <= 0) return t;
    auto subs = subterms(t);
    for (int i = 0; i < static_cast<int>(subs.size()); ++i) {
      const auto* p = subs[static_cast<std::size_t>(i)].as<node::Promote>();
      if (!p || !p->annotation || !chance(cfg_.strip_annotation)) continue;
      Term candidate = replace_at(t, i, Term::promote(p->body));
      auto r = check_in_context(ctx, candidate, opts);
      if (r.ok() && *r.type == type) {
        t = candidate;
        subs = subterms(t);
      }
    }
    return t;
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Label> labels_;
  std::vector<Var> env_;
  int counter_ = 0;
  int budget_ = 0;
  Stats stats_;
};

}  // namespace vl::harness
