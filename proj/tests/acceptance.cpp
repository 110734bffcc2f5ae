// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracle/agreement.hpp"
#include "vl/evaluator.hpp"
#include "vl/harness/semiring_laws.hpp"
#include "vl/harness/suite.hpp"
#include "vl/parser.hpp"
#include "vl/printer.hpp"
#include "vl/typechecker.hpp"

using namespace vl;

namespace {

Term load(const std::string& name) {
  std::ifstream f(std::string(VL_PROGRAMS_DIR) + "/" + name);
  if (!f) throw std::runtime_error("cannot read " + name);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

bool all_ok = true;

void criterion(int n, const std::string& title, double budget, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s >= budget) o.require(false, "took " + std::to_string(s) + "s, budget " + std::to_string(budget) + "s");
  all_ok = all_ok && o.ok;
  std::printf("[%s] %d. %s (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", n, title.c_str(), s, o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
}

Outcome versioned_application() {
  Outcome o;
  Term prog = load("id_succ.vl");
  for (auto [label, want] : {std::pair{"l1", 1}, std::pair{"l2", 3}}) {
    Term t = Term::extract(prog, Label(label));
    auto c = check_program(t);
    o.require(c.ok() && *c.type == Type::integer(), std::string("does not type at Int for ") + label);
    std::vector<std::string> tags;
    auto r = evaluate(t, 10000, [&](const Term&, const StepResult& s) {
      for (auto& tag : trace_tags(s)) tags.push_back(tag);
    });
    o.require(r.ok() && r.term == Term::integer(want),
              std::string("at ") + label + " got " + print(r.term) + ", want " + std::to_string(want));
    o.require(tags.size() >= 3 && tags[0] == "E-CLET" && tags[1] == "subst-ver" && tags[2] == "E-CLET",
              std::string("unexpected first trace tags at ") + label);
  }
  return o;
}

Outcome rejections() {
  Outcome o;
  struct Case {
    const char* file;
    std::string label, missing;
  };
  for (const auto& c : {Case{"id_succ_missing.vl", "l2", "y"}, Case{"rejected_l3.vl", "l3", "f"},
                        Case{"rejected_l2.vl", "l2", "x"}}) {
    auto r = check_program(load(c.file));
    if (r.ok()) {
      o.require(false, std::string(c.file) + " accepted");
      continue;
    }
    const auto& d = r.diagnostics.front();
    o.require(d.code == DiagnosticCode::VersionUnavailable, std::string(c.file) + ": " + d.render());
    std::string want = c.missing + " is not available in " + c.label;
    o.require(d.message.find(want) != std::string::npos, std::string(c.file) + ": message lacks '" + want + "'");
  }
  return o;
}

Outcome acceptances() {
  Outcome o;
  auto v12 = Type::box(Resource::of({"v1", "v2"}), Type::integer());
  auto l1 = Type::box(Resource::of({"l1"}), Type::integer());
  for (auto [file, want] : {std::pair{"intro_application.vl", v12}, std::pair{"common_versions.vl", v12},
                            std::pair{"n_monitors.vl", l1}}) {
    auto r = check_program(load(file));
    o.require(r.ok() && *r.type == want,
              std::string(file) + " typed " + (r.ok() ? r.type->to_string() : r.diagnostics.front().render()));
  }
  return o;
}

Outcome semiring() {
  Outcome o;
  auto rep = harness::check_semiring_laws({Label("l1"), Label("l2"), Label("l3")});
  int ternary = 0;
  for (const auto& law : harness::semiring_laws()) ternary += law.arity == 3;
  o.require(rep.ok(), rep.ok() ? "" : rep.failures.front().describe());
  o.require(rep.checked >= ternary * 729, "only " + std::to_string(rep.checked) + " instances");
  if (o.ok) o.detail = std::to_string(rep.checked) + " instances";
  return o;
}

harness::HarnessConfig harness_config() {
  harness::HarnessConfig cfg;
  cfg.gen.cases = 1000;
  cfg.gen.max_depth = 5;
  cfg.gen.label_universe = {Label("l1"), Label("l2"), Label("l3")};
  cfg.fuel = 10000;
  cfg.lemma_cases = 500;
  return cfg;
}

Outcome reports(const std::vector<harness::PropertyReport>& rs, int min_cases) {
  Outcome o;
  for (const auto& r : rs) {
    o.require(r.ok(), r.name + ": " + r.counterexample.value_or("failed"));
    o.require(r.cases >= min_cases, r.name + ": only " + std::to_string(r.cases) + " cases");
  }
  if (o.ok)
    for (const auto& r : rs) o.detail += (o.detail.empty() ? "" : ", ") + r.name + " " + std::to_string(r.cases);
  return o;
}

Outcome type_safety() { return reports(harness::run_type_safety(harness_config()), 1000); }

Outcome lemmas() {
  auto cfg = harness_config();
  auto o = reports({harness::run_linear_substitution(cfg), harness::run_versioned_substitution(cfg)}, 500);
  auto ow = harness::run_overwrite_safety(cfg);
  auto o2 = reports({ow}, 500 * static_cast<int>(cfg.gen.label_universe.size()));
  o.ok = o.ok && o2.ok;
  o.detail += (o.detail.empty() ? "" : ", ") + o2.detail;
  return o;
}

Outcome agreement() {
  oracle::Space space;
  space.depth = 4;
  space.max_size = 8;
  long logged = 0;
  auto a = oracle::compare(space, [&](const std::string& line) {
    ++logged;
    std::cout << "    permitted: " << line << "\n";
  });
  Outcome o;
  for (const auto& s : a.samples) o.require(false, s);
  o.require(logged == a.permitted, "unlogged discrepancy");
  if (o.ok)
    o.detail = std::to_string(a.terms) + " terms, checker " + std::to_string(a.checker_accepts) + ", oracle " +
               std::to_string(a.oracle_accepts) + ", permitted " + std::to_string(a.permitted);
  return o;
}

}  // namespace

int main() {
  criterion(1, "versioned application evaluates per version", 1, versioned_application);
  criterion(2, "rejected programs report VersionUnavailable", 1, rejections);
  criterion(3, "accepted programs have the exact type", 1, acceptances);
  criterion(4, "semiring laws over three labels", 5, semiring);
  criterion(5, "progress and preservation on closed terms", 120, type_safety);
  criterion(6, "substitution and overwriting lemmas", 120, lemmas);
  criterion(7, "checker agrees with the declarative oracle", 600, agreement);
  return all_ok ? 0 : 1;
}
