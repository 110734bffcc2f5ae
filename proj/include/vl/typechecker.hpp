#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vl/context.hpp"
#include "vl/diagnostic.hpp"
#include "vl/resource.hpp"
#include "vl/term.hpp"
#include "vl/term_ops.hpp"
#include "vl/type.hpp"

namespace vl {

// How a term uses one of its free variables.
struct Usage {
  enum class Kind { Linear, Graded };

  Kind kind = Kind::Linear;
  Resource demand;  // graded only; never ⊥

  static Usage linear() { return {Kind::Linear, Resource{}}; }
  static Usage graded(Resource r) { return {Kind::Graded, std::move(r)}; }

  bool is_linear() const { return kind == Kind::Linear; }

  friend bool operator==(const Usage& a, const Usage& b) {
    return a.kind == b.kind && (a.is_linear() || a.demand == b.demand);
  }
};

// Variable -> usage, in order of first use.
class DemandMap {
 public:
  using Entry = std::pair<std::string, Usage>;

  const Usage* find(const std::string& x) const {
    for (const auto& e : entries_)
      if (e.first == x) return &e.second;
    return nullptr;
  }
  void set(const std::string& x, Usage u) {
    for (auto& e : entries_)
      if (e.first == x) {
        e.second = std::move(u);
        return;
      }
    entries_.emplace_back(x, std::move(u));
  }
  void erase(const std::string& x) {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const Entry& e) { return e.first == x; }),
                   entries_.end());
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
};

struct CheckOptions {
  // Labels available to closed promotions. Defaults to the labels of the
  // term being checked.
  std::optional<std::set<Label>> universe;
};

struct InferResult {
  std::optional<Type> type;
  DemandMap demand;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return type.has_value(); }
};

struct PromotionResult {
  std::optional<Resource> resource;
  DemandMap demand;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return resource.has_value(); }
};

struct CheckResult {
  std::optional<Type> type;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return type.has_value(); }
};

namespace detail {

struct LowerBound {
  Resource bound;
  std::string var;  // empty when no variable is to blame
  Span span;
};

// Types under construction: type metavariables, plus resource
// metavariables for boxes whose resource is not yet known.
class TypeStore {
 public:
  using Id = int;
  using Res = int;
  enum class K { Meta, Int, Arrow, Box, Error };

  Id meta() { return push({K::Meta, -1, -1, -1, -1}); }
  Id integer() {
    if (int_ < 0) int_ = push({K::Int, -1, -1, -1, -1});
    return int_;
  }
  Id error() { return push({K::Error, -1, -1, -1, -1}); }
  Id arrow(Id a, Id b) { return push({K::Arrow, a, b, -1, -1}); }
  Id box(Res r, Id a) { return push({K::Box, a, -1, r, -1}); }

  Res res_const(Resource r) {
    res_.push_back({std::move(r), -1, {}, std::nullopt});
    return static_cast<Res>(res_.size() - 1);
  }
  Res res_meta() {
    res_.push_back({std::nullopt, -1, {}, std::nullopt});
    return static_cast<Res>(res_.size() - 1);
  }
  // A meta that defaults to `fallback` (joined with its lower bounds)
  // when nothing pins it.
  Res res_flexible(Resource fallback) {
    res_.push_back({std::nullopt, -1, {}, std::move(fallback)});
    return static_cast<Res>(res_.size() - 1);
  }

  Id from_type(const Type& t) {
    switch (t.kind()) {
      case Type::Kind::Int: return integer();
      case Type::Kind::Arrow: return arrow(from_type(t.param()), from_type(t.result()));
      case Type::Kind::Box: return box(res_const(t.resource()), from_type(t.inner()));
    }
    return error();
  }

  Id resolve(Id id) const {
    while (types_[id].k == K::Meta && types_[id].bound >= 0) id = types_[id].bound;
    return id;
  }
  K kind(Id id) const { return types_[resolve(id)].k; }
  Id param(Id id) const { return types_[resolve(id)].a; }
  Id result(Id id) const { return types_[resolve(id)].b; }
  Id inner(Id id) const { return types_[resolve(id)].a; }
  Res res(Id id) const { return types_[resolve(id)].res; }

  Res rfind(Res r) const {
    while (res_[r].link >= 0) r = res_[r].link;
    return r;
  }
  const std::optional<Resource>& res_value(Res r) const { return res_[rfind(r)].value; }

  // bound ⊑ r; deferred when r is still unknown.
  bool require_leq(const Resource& bound, Res r, std::string var, Span span) {
    auto& node = res_[rfind(r)];
    if (node.value) return leq(bound, *node.value);
    if (!bound.is_bottom()) node.lower.push_back({bound, std::move(var), span});
    return true;
  }

  bool unify(Id a, Id b) {
    a = resolve(a);
    b = resolve(b);
    if (a == b) return true;
    const auto ka = types_[a].k, kb = types_[b].k;
    if (ka == K::Error || kb == K::Error) return true;
    if (ka == K::Meta) return bind(a, b);
    if (kb == K::Meta) return bind(b, a);
    if (ka != kb) return false;
    switch (ka) {
      case K::Int: return true;
      case K::Arrow:
        return unify(types_[a].a, types_[b].a) && unify(types_[a].b, types_[b].b);
      case K::Box: return unify_res(types_[a].res, types_[b].res) && unify(types_[a].a, types_[b].a);
      default: return false;
    }
  }

  bool unify_res(Res x, Res y) {
    x = rfind(x);
    y = rfind(y);
    if (x == y) return true;
    auto& nx = res_[x];
    auto& ny = res_[y];
    if (nx.value && ny.value) return *nx.value == *ny.value;
    if (nx.value) return unify_res(y, x);
    // x is unknown
    if (ny.value) {
      for (const auto& lb : nx.lower) {
        if (!leq(lb.bound, *ny.value)) {
          violation_ = lb;
          return false;
        }
      }
    } else {
      ny.lower.insert(ny.lower.end(), nx.lower.begin(), nx.lower.end());
      if (nx.fallback) ny.fallback = ny.fallback ? intersect(*ny.fallback, *nx.fallback) : nx.fallback;
    }
    nx.link = y;
    return true;
  }

  const std::optional<LowerBound>& last_violation() const { return violation_; }

  // Unresolved resources default to the join of their lower bounds (and
  // their fallback), unresolved types to Int.
  Resource default_res(Res r) const {
    const auto& n = res_[rfind(r)];
    if (n.value) return *n.value;
    Resource acc = n.fallback ? *n.fallback : Resource::bottom();
    for (const auto& lb : n.lower) acc = plus(acc, lb.bound);
    return acc;
  }

  Type zonk(Id id) const {
    id = resolve(id);
    const auto& n = types_[id];
    switch (n.k) {
      case K::Meta:
      case K::Int:
      case K::Error: return Type::integer();
      case K::Arrow: return Type::arrow(zonk(n.a), zonk(n.b));
      case K::Box: return Type::box(default_res(n.res), zonk(n.a));
    }
    return Type::integer();
  }

  std::string show(Id id) const {
    id = resolve(id);
    const auto& n = types_[id];
    switch (n.k) {
      case K::Meta: return "?t" + std::to_string(id);
      case K::Int: return "Int";
      case K::Error: return "<error>";
      case K::Arrow: {
        auto lhs = show(n.a);
        if (kind(n.a) == K::Arrow) lhs = "(" + lhs + ")";
        return lhs + " -> " + show(n.b);
      }
      case K::Box: {
        auto body = show(n.a);
        if (kind(n.a) == K::Arrow) body = "(" + body + ")";
        const auto& v = res_value(n.res);
        return "[]_" + (v ? v->to_string() : "?r" + std::to_string(rfind(n.res))) + " " + body;
      }
    }
    return "?";
  }

 private:
  struct TNode {
    K k;
    Id a, b;
    Res res;
    Id bound;
  };
  struct RNode {
    std::optional<Resource> value;
    Res link;
    std::vector<LowerBound> lower;
    std::optional<Resource> fallback;
  };

  Id push(TNode n) {
    types_.push_back(n);
    return static_cast<Id>(types_.size() - 1);
  }

  bool occurs(Id m, Id t) const {
    t = resolve(t);
    if (t == m) return true;
    const auto& n = types_[t];
    if (n.k == K::Arrow) return occurs(m, n.a) || occurs(m, n.b);
    if (n.k == K::Box) return occurs(m, n.a);
    return false;
  }

  bool bind(Id m, Id t) {
    if (occurs(m, t)) return false;
    types_[m].bound = t;
    return true;
  }

  std::vector<TNode> types_;
  std::vector<RNode> res_;
  Id int_ = -1;
  std::optional<LowerBound> violation_;
};

class Checker {
 public:
  using Id = TypeStore::Id;
  using Res = TypeStore::Res;

  struct Binding {
    std::string name;
    bool linear;
    Id type;
    Res avail;  // graded only
  };

  struct Out {
    Out(Id t, DemandMap d = {}, bool p = false) : type(t), demand(std::move(d)), poisoned(p) {}

    Id type;
    DemandMap demand;
    bool poisoned = false;
    std::optional<Res> resource;                        // set for promotions
    std::vector<std::pair<std::string, Res>> promoted;  // graded variables a promotion (or let body) captured
  };

  explicit Checker(const std::set<Label>& universe)
      : universe_(Resource::of(std::vector<Label>(universe.begin(), universe.end()))) {}

  TypeStore store;
  std::vector<Diagnostic> diags;
  std::vector<Binding> env;

  void bind_context(const TypingContext& ctx) {
    for (const auto& [x, a] : ctx.entries()) {
      Id t = store.from_type(a.type);
      env.push_back({x, a.is_linear(), t, a.is_linear() ? -1 : store.res_const(a.grade)});
    }
  }

  Out infer(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var: return infer_var(t);
      case Term::Kind::Int: return {store.integer(), {}};
      case Term::Kind::Abs: return infer_abs(t);
      case Term::Kind::App: return infer_app(t, std::nullopt);
      case Term::Kind::Add: return infer_add(t);
      case Term::Kind::LetBox: return infer_let(t, std::nullopt);
      case Term::Kind::Extract: return infer_extract(t);
      case Term::Kind::Promote: return promotion(t, std::nullopt);
      case Term::Kind::Record: {
        const auto* n = t.as<node::Record>();
        return infer_versioned(n->entries, true, std::nullopt);
      }
      case Term::Kind::Comp: {
        const auto* n = t.as<node::Comp>();
        return infer_versioned(n->entries, false, std::nullopt);
      }
    }
    return {store.error(), {}, true};
  }

  // Checking mode: unannotated promotions take their resource from a known
  // expected box type, and the expectation is pushed into let bodies and
  // record entries; everything else synthesizes and unifies.
  Out check(const Term& t, Id expected) {
    const bool box = store.kind(expected) == TypeStore::K::Box;
    Out out{store.error()};
    if (t.kind() == Term::Kind::Promote && box) {
      out = promotion(t, store.res_value(store.res(expected)), store.inner(expected));
    } else if (t.kind() == Term::Kind::LetBox) {
      out = infer_let(t, expected);
    } else if (t.kind() == Term::Kind::App) {
      out = infer_app(t, expected);
    } else if (const auto* r = t.as<node::Record>(); r && box) {
      out = infer_versioned(r->entries, true, store.inner(expected));
    } else if (const auto* c = t.as<node::Comp>()) {
      out = infer_versioned(c->entries, false, expected);
    } else {
      out = infer(t);
    }
    unify_or_report(out.type, expected, t.span(), out.poisoned);
    return out;
  }

  // Resources picked for unannotated promotions, by node.
  std::vector<std::pair<const void*, Res>> chosen;

  // Checker state to back out of a speculative attempt.
  struct Snapshot {
    TypeStore store;
    std::vector<Diagnostic> diags;
    std::size_t chosen;
  };
  Snapshot save() const { return {store, diags, chosen.size()}; }
  void restore(Snapshot s) {
    store = std::move(s.store);
    diags = std::move(s.diags);
    chosen.resize(std::min(chosen.size(), s.chosen));
  }

  // [body], with the resource chosen as: annotation, else a known expected
  // resource, else the largest resource every captured variable can afford.
  // An unannotated promotion whose body only checks when nothing is
  // demanded of the outside falls back to ⊥.
  Out promotion(const Term& t, std::optional<Resource> expected, std::optional<Id> inner = std::nullopt) {
    const auto* p = t.as<node::Promote>();
    std::optional<Resource> fixed = p->annotation ? p->annotation : expected;
    auto body_of = [&] { return inner ? check(p->body, *inner) : infer(p->body); };
    Out body{store.error()};
    if (fixed) {
      scales_.emplace_back(env.size(), *fixed);
      body = body_of();
      scales_.pop_back();
    } else {
      Snapshot before = save();
      body = body_of();
      if (body.poisoned) {
        Snapshot failed = save();
        restore(before);
        scales_.emplace_back(env.size(), Resource::bottom());
        Out retry = body_of();
        scales_.pop_back();
        if (retry.poisoned) {
          restore(failed);
        } else {
          body = std::move(retry);
          fixed = Resource::bottom();
        }
      }
    }
    Out out{store.error(), {}, body.poisoned};

    std::vector<std::pair<std::string, Resource>> graded;  // (x, demand)
    for (const auto& [x, u] : body.demand.entries()) {
      if (u.is_linear()) {
        report(DiagnosticCode::LinearityViolation, t.span(),
               "linear variable " + x + " cannot be used inside a promotion; only versioned variables can",
               std::nullopt, {});
        out.poisoned = true;
        continue;
      }
      graded.emplace_back(x, u.demand);
      out.promoted.emplace_back(x, lookup(x)->avail);
    }

    // What x must offer once the enclosing promotions and record entries
    // scale this promotion's demand. Under an enclosing ⊥ nothing is asked.
    auto needed = [&](const Resource& r, const std::string& x, const Resource& d) {
      return times(scale_of(x), times(r, d));
    };
    auto relaxed = [&](const std::string& x) { return scale_of(x).is_bottom(); };
    auto affordable = [&](const Resource& r, const std::string& x, const Resource& d) {
      const auto& avail = store.res_value(lookup(x)->avail);
      return !avail || leq(needed(r, x, d), *avail);
    };

    Resource r;
    if (fixed) {
      r = *fixed;
    } else {
      std::optional<Resource> meet;
      for (const auto& [x, d] : graded)
        if (const auto& avail = store.res_value(lookup(x)->avail); avail && !relaxed(x))
          meet = meet ? intersect(*meet, *avail) : *avail;
      r = meet ? *meet : universe_;
      bool ok = std::all_of(graded.begin(), graded.end(),
                            [&](const auto& g) { return affordable(r, g.first, g.second); });
      if (!ok) r = Resource::bottom();
    }

    std::vector<std::string> names;
    std::vector<OffendingVar> offending;
    std::optional<Label> missing;
    for (const auto& [x, d] : graded) {
      names.push_back(x);
      const Resource need = times(r, d);
      if (affordable(r, x, d)) {
        if (!relaxed(x)) store.require_leq(need, lookup(x)->avail, x, t.span());
        if (!need.is_bottom()) out.demand.set(x, Usage::graded(need));
        continue;
      }
      const Resource avail = *store.res_value(lookup(x)->avail);
      offending.push_back({x, avail});
      if (!missing) missing = first_missing(needed(r, x, d), avail);
    }
    if (!offending.empty()) {
      std::vector<std::string> bad;
      for (const auto& o : offending) bad.push_back(o.name);
      std::string where = missing ? missing->name() : r.to_string();
      report(DiagnosticCode::VersionUnavailable, t.span(),
             availability_message(names, bad, where), missing ? Resource::single(*missing) : r,
             offending);
      out.poisoned = true;
    }

    // A promotion that captures nothing keeps its resource open for the
    // context to pin, and otherwise takes the greedy choice.
    Res rid = !fixed && graded.empty() ? store.res_flexible(r) : store.res_const(r);
    if (!p->annotation) chosen.emplace_back(t.id(), rid);
    out.resource = rid;
    out.type = store.box(rid, body.type);
    return out;
  }

  const Binding* lookup(const std::string& x) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->name == x) return &*it;
    return nullptr;
  }

  // Product of the resources of the promotions and record entries entered
  // since x was bound.
  Resource scale_of(const std::string& x) const {
    const auto at = static_cast<std::size_t>(lookup(x) - env.data());
    Resource acc = Resource::empty();
    for (const auto& [mark, r] : scales_)
      if (at < mark) acc = times(acc, r);
    return acc;
  }

 private:
  static std::optional<Label> first_missing(const Resource& need, const Resource& avail) {
    for (const auto& l : need.labels())
      if (!avail.contains(l)) return l;
    return std::nullopt;
  }

  static std::string availability_message(const std::vector<std::string>& expected,
                                          const std::vector<std::string>& offending,
                                          const std::string& where) {
    auto verb = [](std::size_t n) { return n == 1 ? " is" : " are"; };
    return join_names(expected) + verb(expected.size()) + " expected to be available in " + where +
           ", but " + join_names(offending) + verb(offending.size()) + " not available in " + where;
  }

  void report(DiagnosticCode code, Span span, std::string msg, std::optional<Resource> labels,
              std::vector<OffendingVar> vars) {
    diags.push_back({code, std::move(msg), span, std::move(labels), std::move(vars)});
  }

  void unify_or_report(Id actual, Id expected, Span span, bool& poisoned) {
    if (store.unify(actual, expected)) return;
    std::string msg = "expected " + store.show(expected) + ", found " + store.show(actual);
    if (const auto& v = store.last_violation(); v && !v->var.empty())
      msg += " (" + v->var + " is required in " + v->bound.to_string() + ")";
    report(DiagnosticCode::TypeMismatch, span, std::move(msg), std::nullopt, {});
    poisoned = true;
  }

  DemandMap merge(const DemandMap& a, const DemandMap& b, Span span, bool& poisoned) {
    DemandMap out = a;
    for (const auto& [x, u] : b.entries()) {
      const Usage* prev = out.find(x);
      if (!prev) {
        out.set(x, u);
      } else if (prev->is_linear() || u.is_linear()) {
        report(DiagnosticCode::LinearityViolation, span,
               "linear variable " + x + " is used more than once", std::nullopt, {});
        poisoned = true;
      } else {
        out.set(x, Usage::graded(plus(prev->demand, u.demand)));
      }
    }
    return out;
  }

  Out infer_var(const Term& t) {
    const auto& x = t.as<node::Var>()->name;
    const Binding* b = lookup(x);
    if (!b) {
      report(DiagnosticCode::UnknownVariable, t.span(), "unknown variable " + x, std::nullopt, {});
      return {store.error(), {}, true};
    }
    Out out{b->type, {}};
    out.demand.set(x, b->linear ? Usage::linear() : Usage::graded(Resource::empty()));
    return out;
  }

  Out infer_abs(const Term& t) {
    const auto* n = t.as<node::Abs>();
    Id param = store.meta();
    env.push_back({n->param, true, param, -1});
    Out body = infer(n->body);
    env.pop_back();
    if (!body.demand.find(n->param) && !body.poisoned) {
      report(DiagnosticCode::LinearityViolation, t.span(),
             "linear variable " + n->param + " is never used; lambda-bound variables must be used exactly once",
             std::nullopt, {});
      body.poisoned = true;
    }
    body.demand.erase(n->param);
    return {store.arrow(param, body.type), std::move(body.demand), body.poisoned};
  }

  Out infer_app(const Term& t, std::optional<Id> expected) {
    const auto* n = t.as<node::App>();
    Out fn = infer(n->fn);
    Id param, result;
    switch (store.kind(fn.type)) {
      case TypeStore::K::Arrow:
        param = store.param(fn.type);
        result = store.result(fn.type);
        break;
      case TypeStore::K::Meta:
        param = store.meta();
        result = store.meta();
        store.unify(fn.type, store.arrow(param, result));
        break;
      case TypeStore::K::Error:
        param = store.error();
        result = store.error();
        break;
      default:
        report(DiagnosticCode::TypeMismatch, n->fn.span(),
               "cannot apply a value of type " + store.show(fn.type), std::nullopt, {});
        fn.poisoned = true;
        param = store.error();
        result = store.error();
    }
    // A known result type can pin the parameter before the argument is seen;
    // a clash is reported by the caller.
    if (expected) store.unify(result, *expected);
    Out arg = check(n->arg, param);
    bool poisoned = fn.poisoned || arg.poisoned;
    DemandMap d = merge(fn.demand, arg.demand, t.span(), poisoned);
    return {result, std::move(d), poisoned};
  }

  Out infer_add(const Term& t) {
    const auto* n = t.as<node::Add>();
    Out lhs = check(n->lhs, store.integer());
    Out rhs = check(n->rhs, store.integer());
    bool poisoned = lhs.poisoned || rhs.poisoned;
    DemandMap d = merge(lhs.demand, rhs.demand, t.span(), poisoned);
    return {store.integer(), std::move(d), poisoned};
  }

  // Views a synthesized type as []_r A, inventing metavariables if needed.
  bool as_box(Out& o, const Term& t, const std::string& what, Res& r, Id& inner) {
    switch (store.kind(o.type)) {
      case TypeStore::K::Box:
        r = store.res(o.type);
        inner = store.inner(o.type);
        return true;
      case TypeStore::K::Meta:
        r = store.res_meta();
        inner = store.meta();
        store.unify(o.type, store.box(r, inner));
        return true;
      case TypeStore::K::Error: break;
      default:
        report(DiagnosticCode::NotAVersionedValue, t.span(),
               what + " expects a versioned value, found " + store.show(o.type), std::nullopt, {});
    }
    o.poisoned = true;
    r = store.res_meta();
    inner = store.error();
    return false;
  }

  Out infer_let(const Term& t, std::optional<Id> expected) {
    const auto* n = t.as<node::LetBox>();
    Out bound = infer(n->bound);
    Res r;
    Id inner;
    as_box(bound, n->bound, "let [" + n->name + "]", r, inner);
    env.push_back({n->name, false, inner, r});
    Out body = expected ? check(n->body, *expected) : infer(n->body);
    env.pop_back();
    if (const Usage* u = body.demand.find(n->name)) {
      if (!store.require_leq(u->demand, r, n->name, t.span())) {
        const Resource avail = *store.res_value(r);
        auto missing = first_missing(u->demand, avail);
        std::string where = missing ? missing->name() : u->demand.to_string();
        report(DiagnosticCode::VersionUnavailable, t.span(),
               availability_message({n->name}, {n->name}, where),
               missing ? Resource::single(*missing) : u->demand, {{n->name, avail}});
        body.poisoned = true;
      }
      body.demand.erase(n->name);
    }
    bool poisoned = bound.poisoned || body.poisoned;
    DemandMap d = merge(bound.demand, body.demand, t.span(), poisoned);
    Out out{body.type, std::move(d), poisoned};
    out.promoted = std::move(body.promoted);  // so a later extraction can name them
    return out;
  }

  Out infer_extract(const Term& t) {
    const auto* n = t.as<node::Extract>();
    Out inner = infer(n->inner);
    Res r;
    Id payload;
    if (!as_box(inner, n->inner, "extraction ." + n->label.name(), r, payload))
      return {payload, std::move(inner.demand), true};
    const Resource want = Resource::single(n->label);
    if (store.require_leq(want, r, "", t.span())) return {payload, std::move(inner.demand), inner.poisoned};

    const Resource have = *store.res_value(r);
    const std::string& l = n->label.name();
    std::vector<std::string> names;
    std::vector<OffendingVar> offending;
    if (!inner.promoted.empty()) {
      for (const auto& [x, avail] : inner.promoted) {
        names.push_back(x);
        const Resource a = store.default_res(avail);
        if (!a.contains(n->label)) offending.push_back({x, a});
      }
    } else if (const auto* v = n->inner.as<node::Var>()) {
      names.push_back(v->name);
      offending.push_back({v->name, have});
    }
    if (!offending.empty()) {
      std::vector<std::string> bad;
      for (const auto& o : offending) bad.push_back(o.name);
      report(DiagnosticCode::VersionUnavailable, t.span(), availability_message(names, bad, l), want,
             offending);
    } else {
      report(DiagnosticCode::EmptyIntersection, t.span(),
             "cannot extract version " + l + " from a value of type " + store.show(inner.type) +
                 ": it is only available in " + have.to_string(),
             want, {});
    }
    return {payload, std::move(inner.demand), true};
  }

  // How many greedy promotion choices the type synthesized for t hinges on.
  static int greedy(const Term& t) {
    if (const auto* p = t.as<node::Promote>())
      return (!p->annotation && !free_vars(p->body).empty()) + greedy(p->body);
    if (const auto* n = t.as<node::LetBox>()) return greedy(n->body);
    const Entries* es = nullptr;
    if (const auto* r = t.as<node::Record>()) es = &r->entries;
    if (const auto* c = t.as<node::Comp>()) es = &c->entries;
    int least = 0;
    if (es)
      for (std::size_t i = 0; i < es->size(); ++i) {
        int g = greedy((*es)[i].second);
        if (i == 0 || g < least) least = g;
      }
    return least;
  }

  // Versioned records (boxed result) and versioned computations (unboxed).
  // Entries share one type, taken from `entry_type` or else from the first
  // entry whose type depends on the fewest greedy promotion choices.
  Out infer_versioned(const Entries& entries, bool boxed, std::optional<Id> entry_type) {
    Out out{store.error(), {}, false};
    std::vector<Label> labels;
    for (const auto& [l, e] : entries) labels.push_back(l);

    std::optional<Id> common;
    std::vector<Out> outs;
    auto attempt = [&](std::optional<std::size_t> anchor) {
      common = entry_type;
      outs.assign(entries.size(), Out{store.error()});
      std::vector<std::size_t> order;
      if (anchor) order.push_back(*anchor);
      for (std::size_t i = 0; i < entries.size(); ++i)
        if (i != anchor) order.push_back(i);
      bool clean = true;
      for (std::size_t i : order) {
        scales_.emplace_back(env.size(), Resource::single(entries[i].first));
        outs[i] = common ? check(entries[i].second, *common) : infer(entries[i].second);
        scales_.pop_back();
        if (!common) common = outs[i].type;
        clean = clean && !outs[i].poisoned;
      }
      return clean;
    };
    if (entry_type || entries.size() < 2) {
      attempt(std::nullopt);
    } else {
      // Anchors are tried in order of how little their type owes to greedy
      // choices; the first that lets every entry check wins.
      std::vector<std::size_t> anchors;
      for (std::size_t i = 0; i < entries.size(); ++i) anchors.push_back(i);
      std::stable_sort(anchors.begin(), anchors.end(), [&](std::size_t i, std::size_t j) {
        return greedy(entries[i].second) < greedy(entries[j].second);
      });
      Snapshot before = save();
      bool done = false;
      for (std::size_t a : anchors) {
        if (attempt(a)) {
          done = true;
          break;
        }
        restore(before);
      }
      if (!done) attempt(anchors.front());
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& [l, e] = entries[i];
      Out& entry = outs[i];
      out.poisoned |= entry.poisoned;
      for (const auto& [x, u] : entry.demand.entries()) {
        if (u.is_linear()) {
          report(DiagnosticCode::LinearityViolation, e.span(),
                 "linear variable " + x + " cannot be used inside a versioned record; only versioned variables can",
                 std::nullopt, {});
          out.poisoned = true;
          continue;
        }
        const Resource need = times(Resource::single(l), u.demand);
        const Usage* prev = out.demand.find(x);
        out.demand.set(x, Usage::graded(prev ? plus(prev->demand, need) : need));
      }
    }
    out.type = boxed ? store.box(store.res_const(Resource::of(labels)), *common) : *common;
    return out;
  }

  Resource universe_;
  std::vector<std::pair<std::size_t, Resource>> scales_;  // (env size on entry, resource)
};

inline std::set<Label> universe_for(const Term& t, const CheckOptions& opts) {
  return opts.universe ? *opts.universe : label_universe(t);
}

}  // namespace detail

/// Synthesizes a type for `t` under `env`, together with the minimal
/// demand on each free variable. Demands are not validated against the
/// grades declared in `env`; see `check_in_context`.
inline InferResult infer(const TypingContext& env, const Term& t, const CheckOptions& opts = {}) {
  detail::Checker c(detail::universe_for(t, opts));
  c.bind_context(env);
  auto out = c.infer(t);
  InferResult r;
  r.diagnostics = std::move(c.diags);
  if (r.diagnostics.empty()) {
    r.type = c.store.zonk(out.type);
    r.demand = std::move(out.demand);
  }
  return r;
}

/// Types the promotion [body] under `env` and reports the chosen resource.
inline PromotionResult infer_promotion(const TypingContext& env, const Term& body,
                                       std::optional<Resource> annotation,
                                       std::optional<Resource> expected,
                                       const CheckOptions& opts = {}) {
  Term p = Term::promote(body, std::move(annotation));
  detail::Checker c(detail::universe_for(p, opts));
  c.bind_context(env);
  auto out = c.promotion(p, std::move(expected));
  PromotionResult r;
  r.diagnostics = std::move(c.diags);
  if (r.diagnostics.empty()) {
    r.resource = c.store.default_res(*out.resource);
    r.demand = std::move(out.demand);
  }
  return r;
}

/// Checks `t` under the declared context: linear assumptions must be used
/// exactly once and every graded demand must fit under its declared grade.
inline CheckResult check_in_context(const TypingContext& ctx, const Term& t,
                                    const CheckOptions& opts = {}) {
  detail::Checker c(detail::universe_for(t, opts));
  c.bind_context(ctx);
  auto out = c.infer(t);
  if (!out.poisoned) {
    for (const auto& [x, a] : ctx.entries()) {
      const Usage* u = out.demand.find(x);
      if (a.is_linear()) {
        if (!u)
          c.diags.push_back({DiagnosticCode::LinearityViolation,
                             "linear variable " + x + " is never used", t.span(), std::nullopt, {}});
        continue;
      }
      if (u && !leq(u->demand, a.grade)) {
        Label missing;
        for (const auto& l : u->demand.labels())
          if (!a.grade.contains(l)) {
            missing = l;
            break;
          }
        c.diags.push_back({DiagnosticCode::VersionUnavailable,
                           x + " is expected to be available in " + missing.name() + ", but " + x +
                               " is not available in " + missing.name(),
                           t.span(), Resource::single(missing), {{x, a.grade}}});
      }
    }
  }
  CheckResult r;
  r.diagnostics = std::move(c.diags);
  if (r.diagnostics.empty()) r.type = c.store.zonk(out.type);
  return r;
}

/// `t` with every unannotated promotion annotated by the resource the
/// checker chose for it, or nullopt when `t` does not check under `ctx`.
inline std::optional<Term> elaborate(const TypingContext& ctx, const Term& t, const CheckOptions& opts = {}) {
  if (!check_in_context(ctx, t, opts).ok()) return std::nullopt;
  detail::Checker c(detail::universe_for(t, opts));
  c.bind_context(ctx);
  c.infer(t);
  std::function<Term(const Term&)> go = [&](const Term& s) {
    auto cs = children(s);
    for (auto& x : cs) x = go(x);
    if (const auto* p = s.as<node::Promote>(); p && !p->annotation)
      for (const auto& [id, r] : c.chosen)
        if (id == s.id()) return Term::promote(cs[0], c.store.default_res(r), s.span());
    return with_children(s, cs);
  };
  return go(t);
}

/// Checks a closed program. Free variables are reported as unknown.
inline CheckResult check_program(const Term& t, const CheckOptions& opts = {}) {
  return check_in_context(TypingContext{}, t, opts);
}

}  // namespace vl
