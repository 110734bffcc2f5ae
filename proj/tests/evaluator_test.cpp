#include <gtest/gtest.h>

#include <limits>

#include "support.hpp"
#include "vl/evaluator.hpp"
#include "vl/harness/generator.hpp"
#include "vl/harness/properties.hpp"
#include "vl/printer.hpp"

using namespace vl;
using namespace vl::test;

namespace {

const char* kIdSucc =
    "let [f] = {l1 = \\x. x, l2 = \\x. x + 1 | l1} in let [y] = {l1 = 1, l2 = 2 | l1} in [f y]";

Term eval_ok(const Term& t, int fuel = 10000) {
  auto r = evaluate(t, fuel);
  EXPECT_TRUE(r.ok()) << print(t) << ": " << r.reason;
  return r.term;
}

std::vector<std::string> all_tags(const Term& t) {
  std::vector<std::string> tags;
  evaluate(t, 10000, [&](const Term&, const StepResult& s) {
    for (auto& tag : trace_tags(s)) tags.push_back(tag);
  });
  return tags;
}

std::vector<Term> generated(int n, std::uint64_t seed, bool comp) {
  harness::GenConfig cfg;
  cfg.allow_comp = comp;
  std::vector<Term> out;
  for (int i = 0; i < n; ++i) {
    cfg.seed = seed + static_cast<std::uint64_t>(i);
    harness::Generator g(cfg);
    out.push_back(g.closed().term);
  }
  return out;
}

}  // namespace

TEST(Overwrite, Computations) {
  const Label l1("l1"), l2("l2"), l3("l3");
  EXPECT_EQ(overwrite(PI("<l1 = 1, l2 = 2 | l1>"), l2), PI("<l1 = 1, l2 = 2 | l2>"));
  EXPECT_EQ(overwrite(PI("<l1 = 1 | l1>"), l3), PI("<l1 = 1 | l1>"));
  EXPECT_EQ(overwrite(P("[f y]"), l1), P("[f y]"));
  EXPECT_EQ(overwrite(P("{l1 = 1, l2 = 2 | l1}"), l2), P("{l1 = 1, l2 = 2 | l1}"));
  EXPECT_EQ(overwrite(P("5"), l1), P("5"));
  EXPECT_EQ(overwrite(P("x"), l1), P("x"));
}

TEST(Overwrite, DescendsStructurally) {
  const Label l2("l2");
  EXPECT_EQ(overwrite(PI("\\x. <l1 = x, l2 = x | l1>"), l2), PI("\\x. <l1 = x, l2 = x | l2>"));
  EXPECT_EQ(overwrite(PI("<l1 = f, l2 = g | l1> <l1 = 1, l2 = 2 | l1>"), l2),
            PI("<l1 = f, l2 = g | l2> <l1 = 1, l2 = 2 | l2>"));
  EXPECT_EQ(overwrite(PI("let [x] = <l1 = a, l2 = b | l1> in <l1 = x, l2 = x | l1>"), l2),
            PI("let [x] = <l1 = a, l2 = b | l2> in <l1 = x, l2 = x | l2>"));
  EXPECT_EQ(overwrite(PI("(<l1 = a, l2 = b | l1>).l1"), l2), PI("(<l1 = a, l2 = b | l2>).l1"));
  EXPECT_EQ(overwrite(PI("<l1 = 1, l2 = 2 | l1> + <l1 = 1, l2 = 2 | l1>"), l2),
            PI("<l1 = 1, l2 = 2 | l2> + <l1 = 1, l2 = 2 | l2>"));
  // entries keep their own defaults
  EXPECT_EQ(overwrite(PI("<l1 = <l1 = 1, l2 = 2 | l1>, l2 = 3 | l1>"), l2),
            PI("<l1 = <l1 = 1, l2 = 2 | l1>, l2 = 3 | l2>"));
}

TEST(Overwrite, IdempotentAndKeepsValueStatus) {
  for (const auto& t : generated(200, 77, true))
    for (const char* l : {"l1", "l2", "l3"}) {
      Label lab(l);
      Term once = overwrite(t, lab);
      EXPECT_EQ(overwrite(once, lab), once) << print(t);
      EXPECT_EQ(once.is_value(), t.is_value()) << print(t);
      for (const auto& s : subterms(t)) EXPECT_EQ(overwrite(s, lab).is_value(), s.is_value());
    }
}

TEST(SubstBoxed, Box) { EXPECT_EQ(subst_boxed(P("[5]"), "x", P("x + x")), P("5 + 5")); }

TEST(SubstBoxed, Record) {
  SubstKind kind{};
  auto r = subst_boxed(P("{l1 = \\x. x, l2 = \\x. x + 1 | l1}"), "f", P("let [y] = {l1 = 1, l2 = 2 | l1} in [f y]"),
                       &kind);
  ASSERT_TRUE(r);
  EXPECT_EQ(kind, SubstKind::Ver);
  EXPECT_EQ(*r, PI("let [y] = {l1 = 1, l2 = 2 | l1} in [<l1 = \\x. x, l2 = \\x. x + 1 | l1> y]"));
}

TEST(SubstBoxed, RejectsOtherValues) { EXPECT_FALSE(subst_boxed(P("\\x. x"), "f", P("f"))); }

TEST(Step, FirstStepOfVersionedApplication) {
  auto r = step(P(kIdSucc));
  ASSERT_TRUE(r.stepped());
  EXPECT_EQ(r.rule, Rule::EClet);
  EXPECT_EQ(r.subst_kind, SubstKind::Ver);
  EXPECT_EQ(print(r.next), "let [y] = {l1 = 1, l2 = 2 | l1} in [<l1 = \\x. x, l2 = \\x. x + 1 | l1> y]");
}

TEST(Step, ExtractionOverwrites) {
  Term t = PI("[<l1 = \\x. x, l2 = \\x. x + 1 | l1> <l1 = 1, l2 = 2 | l1>].l1");
  auto r = step(t);
  ASSERT_TRUE(r.stepped());
  EXPECT_EQ(r.rule, Rule::EEx1);
  ASSERT_TRUE(r.before_overwrite);
  EXPECT_EQ(print(*r.before_overwrite), "<l1 = \\x. x, l2 = \\x. x + 1 | l1> <l1 = 1, l2 = 2 | l1>");
  EXPECT_EQ(r.overwrite_label, Label("l1"));
}

TEST(Step, RecordExtractionAndComputation) {
  auto r = step(PI("{l1 = <l1 = 1, l2 = 2 | l1>, l2 = 3 | l1}.l1"));
  EXPECT_EQ(r.rule, Rule::EEx2);
  EXPECT_EQ(r.next, PI("<l1 = 1, l2 = 2 | l1>"));
  auto v = step(PI("<l1 = 1, l2 = 2 | l2>"));
  EXPECT_EQ(v.rule, Rule::EVeri);
  EXPECT_EQ(v.next, P("2"));
}

TEST(Step, ValuesDoNotStep) {
  for (const char* src : {"42", "\\x. x", "[1 + 1]", "{l1 = 1 + 1 | l1}"})
    EXPECT_EQ(step(P(src)).status, StepResult::Status::Value) << src;
}

TEST(Step, CallByName) {
  auto r = step(P("(\\x. 1) (2 + 3)"));
  EXPECT_EQ(r.rule, Rule::EAbs);
  EXPECT_EQ(r.next, P("1"));
  EXPECT_EQ(step(P("(\\x. x) (2 + 3)")).next, P("2 + 3"));
}

TEST(Step, StuckTerms) {
  for (const char* src : {"{l1 = 1 | l1}.l2", "1 2", "(\\x. x) + 1", "let [x] = 1 in x", "x", "1.l1"})
    EXPECT_EQ(step(P(src)).status, StepResult::Status::Stuck) << src;
}

TEST(Step, NeverUnderBinders) {
  EXPECT_EQ(step(P("\\x. (\\y. y) x")).status, StepResult::Status::Value);
  EXPECT_EQ(step(P("[(\\y. y) 1]")).status, StepResult::Status::Value);
  EXPECT_EQ(step(P("{l1 = 1 + 1 | l1}")).status, StepResult::Status::Value);
}

TEST(Step, AdditionLeftToRightAndWrapping) {
  EXPECT_EQ(step(P("(1 + 2) + (3 + 4)")).next, P("3 + (3 + 4)"));
  EXPECT_EQ(step(P("3 + (3 + 4)")).next, P("3 + 7"));
  Term big = Term::add(Term::integer(std::numeric_limits<std::int64_t>::max()), Term::integer(1));
  EXPECT_EQ(eval_ok(big), Term::integer(std::numeric_limits<std::int64_t>::min()));
}

TEST(Evaluate, VersionedApplicationAtEachVersion) {
  EXPECT_EQ(eval_ok(P(std::string(kIdSucc) + ".l1")), P("1"));
  EXPECT_EQ(eval_ok(P(std::string(kIdSucc) + ".l2")), P("3"));
}

TEST(Evaluate, TraceTags) {
  auto tags = all_tags(P(std::string(kIdSucc) + ".l1"));
  ASSERT_GE(tags.size(), 3u);
  EXPECT_EQ(tags[0], "E-CLET");
  EXPECT_EQ(tags[1], "subst-ver");
  EXPECT_EQ(tags[2], "E-CLET");
}

TEST(Evaluate, TraceLines) {
  std::vector<std::string> lines;
  evaluate(P("[2 + 1].l1"), 100, [&](const Term&, const StepResult& s) {
    for (auto& l : trace_lines(s)) lines.push_back(l);
  });
  EXPECT_EQ(lines, (std::vector<std::string>{"-->[E-EX1] 2 + 1", "===[@l1] 2 + 1", "-->[E-ADD] 3"}));
}

TEST(Evaluate, ReachesTheSuspendedComputation) {
  EXPECT_EQ(print(eval_ok(P(kIdSucc))), "[<l1 = \\x. x, l2 = \\x. x + 1 | l1> <l1 = 1, l2 = 2 | l1>]");
}

TEST(Evaluate, FuelExhausted) {
  auto r = evaluate(P("(\\x. x x) (\\x. x x)"), 100);
  EXPECT_EQ(r.status, EvalResult::Status::FuelExhausted);
  EXPECT_EQ(r.steps, 100);
}

TEST(Evaluate, Stuck) {
  auto r = evaluate(P("{l1 = 1 | l1}.l2"));
  EXPECT_EQ(r.status, EvalResult::Status::Stuck);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Property, AtMostOneDecomposition) {
  for (const auto& t : generated(300, 4000, true)) {
    Term cur = t;
    for (int i = 0; i < 200; ++i) {
      EXPECT_FALSE(harness::check_determinism(cur)) << print(cur);
      auto r = step(cur);
      if (!r.stepped()) break;
      cur = r.next;
    }
  }
}
