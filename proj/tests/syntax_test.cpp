#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "support.hpp"
#include "vl/harness/generator.hpp"
#include "vl/parser.hpp"
#include "vl/printer.hpp"
#include "vl/term_ops.hpp"

using namespace vl;
using namespace vl::test;

namespace {

Term var(const char* x) { return Term::var(x); }
Term lit(std::int64_t n) { return Term::integer(n); }
Label L(const char* l) { return Label(l); }

ParseError::Kind parse_error_kind(const std::string& src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "parsed: " << src;
  return ParseError::Kind::Syntax;
}

// Alpha-equivalence: bound names are compared by binding depth.
bool alpha_eq(const Term& a, const Term& b, std::map<std::string, int> ea, std::map<std::string, int> eb,
              int depth) {
  if (a.kind() != b.kind()) return false;
  auto bind = [&](const std::string& x, const std::string& y) {
    ea[x] = depth;
    eb[y] = depth;
  };
  switch (a.kind()) {
    case Term::Kind::Var: {
      const auto& x = a.as<node::Var>()->name;
      const auto& y = b.as<node::Var>()->name;
      auto ix = ea.find(x), iy = eb.find(y);
      if (ix == ea.end() || iy == eb.end()) return ix == ea.end() && iy == eb.end() && x == y;
      return ix->second == iy->second;
    }
    case Term::Kind::Int: return a.as<node::Int>()->value == b.as<node::Int>()->value;
    case Term::Kind::Abs: {
      const auto *x = a.as<node::Abs>(), *y = b.as<node::Abs>();
      bind(x->param, y->param);
      return alpha_eq(x->body, y->body, ea, eb, depth + 1);
    }
    case Term::Kind::LetBox: {
      const auto *x = a.as<node::LetBox>(), *y = b.as<node::LetBox>();
      if (!alpha_eq(x->bound, y->bound, ea, eb, depth)) return false;
      bind(x->name, y->name);
      return alpha_eq(x->body, y->body, ea, eb, depth + 1);
    }
    case Term::Kind::Promote:
      if (a.as<node::Promote>()->annotation != b.as<node::Promote>()->annotation) return false;
      break;
    case Term::Kind::Extract:
      if (a.as<node::Extract>()->label != b.as<node::Extract>()->label) return false;
      break;
    case Term::Kind::Record:
      if (a.as<node::Record>()->default_label != b.as<node::Record>()->default_label) return false;
      break;
    case Term::Kind::Comp:
      if (a.as<node::Comp>()->default_label != b.as<node::Comp>()->default_label) return false;
      break;
    default: break;
  }
  auto ca = children(a), cb = children(b);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!alpha_eq(ca[i], cb[i], ea, eb, depth)) return false;
  return true;
}

bool alpha_eq(const Term& a, const Term& b) { return alpha_eq(a, b, {}, {}, 0); }

std::vector<Term> generated_terms(int n, bool comp) {
  std::vector<Term> out;
  harness::GenConfig cfg;
  cfg.max_depth = 5;
  cfg.allow_comp = comp;
  for (int i = 0; i < n; ++i) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    harness::Generator g(cfg);
    out.push_back(g.closed().term);
  }
  return out;
}

}  // namespace

TEST(Parse, LetRecordPromote) {
  Term t = P("let [f] = {l1 = \\x.x, l2 = \\x.x+1 | l1} in [f]");
  Term want = Term::let_box(
      "f",
      Term::record({{L("l1"), Term::abs("x", var("x"))}, {L("l2"), Term::abs("x", Term::add(var("x"), lit(1)))}},
                   L("l1")),
      Term::promote(var("f")));
  EXPECT_EQ(t, want);
}

TEST(Parse, ExtractBindsTightest) {
  EXPECT_EQ(P("[f y].l2"), Term::extract(Term::promote(Term::app(var("f"), var("y"))), L("l2")));
  EXPECT_EQ(P("f y.l1"), Term::app(var("f"), Term::extract(var("y"), L("l1"))));
  EXPECT_EQ(P("f x + g y"), Term::add(Term::app(var("f"), var("x")), Term::app(var("g"), var("y"))));
  EXPECT_EQ(P("1 + 2 + 3"), Term::add(Term::add(lit(1), lit(2)), lit(3)));
  EXPECT_EQ(P("\\x. x + 1"), Term::abs("x", Term::add(var("x"), lit(1))));
}

TEST(Parse, Annotations) {
  EXPECT_EQ(P("[5]@{l1}"), Term::promote(lit(5), R({"l1"})));
  EXPECT_EQ(P("[5]@{}"), Term::promote(lit(5), Resource::empty()));
  EXPECT_EQ(P("[5]@bot"), Term::promote(lit(5), bot()));
  EXPECT_EQ(P("[5]@{v1.0, v2.0}"), Term::promote(lit(5), R({"v1.0", "v2.0"})));
}

TEST(Parse, CommentsAndSpans) {
  Term t = P("-- a comment\n  let [x] = [1] in\n  x -- trailing\n");
  EXPECT_EQ(t.kind(), Term::Kind::LetBox);
  EXPECT_EQ(t.span().line, 2);
  EXPECT_EQ(t.span().col, 3);
}

TEST(Parse, Errors) {
  EXPECT_EQ(parse_error_kind("{l1 = 1 | l2}"), ParseError::Kind::DefaultLabelMissing);
  EXPECT_EQ(parse_error_kind("{l1 = 1, l1 = 2 | l1}"), ParseError::Kind::DuplicateRecordLabel);
  EXPECT_EQ(parse_error_kind("<l1 = 1 | l1>"), ParseError::Kind::IntermediateForm);
  EXPECT_EQ(parse_error_kind("1 @ l1"), ParseError::Kind::IntermediateForm);
  EXPECT_EQ(parse_error_kind("99999999999999999999"), ParseError::Kind::IntegerRange);
  EXPECT_EQ(parse_error_kind("let [x] = 1"), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error_kind("def x = 1"), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error_kind(""), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error_kind("(1"), ParseError::Kind::Syntax);
}

TEST(Parse, ErrorPositionAndExpectations) {
  try {
    parse("let [x] = 1\nin ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where().line, 2);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parse, IntermediateFormsWhenAllowed) {
  EXPECT_EQ(PI("<l1 = 1, l2 = 2 | l1>"), Term::comp({{L("l1"), lit(1)}, {L("l2"), lit(2)}}, L("l1")));
}

TEST(Print, FixedNotation) {
  EXPECT_EQ(print(Term::comp({{L("l1"), lit(1)}, {L("l2"), lit(2)}}, L("l1"))), "<l1 = 1, l2 = 2 | l1>");
  EXPECT_EQ(print(Term::promote(lit(5), R({"l1"}))), "[5]@{l1}");
  EXPECT_EQ(print(P("(\\x. x) 1")), "(\\x. x) 1");
  EXPECT_EQ(print(P("f (g x)")), "f (g x)");
  EXPECT_EQ(print(P("(f x).l1")), "(f x).l1");
  EXPECT_EQ(print(P("1 + (2 + 3)")), "1 + (2 + 3)");
}

TEST(Print, RoundTripsGoldenPrograms) {
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(programs_dir())) {
    if (entry.path().extension() != ".vl") continue;
    std::ifstream f(entry.path());
    std::stringstream ss;
    ss << f.rdbuf();
    Term t = parse(ss.str());
    EXPECT_EQ(parse(print(t)), t) << entry.path();
    ++files;
  }
  EXPECT_GT(files, 0);
}

TEST(Print, RoundTripsGeneratedTerms) {
  for (const auto& t : generated_terms(300, false)) EXPECT_EQ(parse(print(t)), t) << print(t);
  for (const auto& t : generated_terms(100, true)) EXPECT_EQ(PI(print(t)), t) << print(t);
}

TEST(FreeVars, Basics) {
  EXPECT_EQ(free_vars(P("\\x. x y")), (std::set<std::string>{"y"}));
  EXPECT_EQ(free_vars(P("let [x] = z in [x]")), (std::set<std::string>{"z"}));
  EXPECT_EQ(free_vars(P("let [x] = x in x")), (std::set<std::string>{"x"}));
  EXPECT_TRUE(free_vars(P("1")).empty());
}

TEST(LabelUniverse, Basics) {
  EXPECT_EQ(label_universe(P("let [f] = {l1 = \\x. x, l2 = \\x. x + 1 | l1} in let [y] = {l1 = 1 | l1} in [f y].l2")),
            (std::set<Label>{L("l1"), L("l2")}));
  EXPECT_TRUE(label_universe(P("1")).empty());
  EXPECT_EQ(label_universe(P("[1].l3")), (std::set<Label>{L("l3")}));
  EXPECT_EQ(label_universe(P("[1]@{l4}")), (std::set<Label>{L("l4")}));
}

TEST(Subst, Basics) {
  EXPECT_EQ(subst(P("x + x"), "x", lit(1)), P("1 + 1"));
  EXPECT_EQ(subst(P("\\x. x"), "x", lit(1)), P("\\x. x"));
  EXPECT_EQ(subst(P("let [x] = x in x"), "x", lit(1)), P("let [x] = 1 in x"));
}

TEST(Subst, AvoidsCapture) {
  Term r = subst(P("\\y. x"), "x", var("y"));
  const auto* abs = r.as<node::Abs>();
  ASSERT_NE(abs, nullptr);
  EXPECT_NE(abs->param, "y");
  EXPECT_EQ(abs->body, var("y"));
  EXPECT_TRUE(alpha_eq(r, P("\\z. y")));
  Term l = subst(P("let [y] = x in [x y]"), "x", var("y"));
  EXPECT_TRUE(alpha_eq(l, P("let [z] = y in [y z]")));
}

TEST(Subst, VersionedComputationIntoLet) {
  Term comp = PI("<l1 = \\x. x, l2 = \\x. x + 1 | l1>");
  Term body = P("let [y] = {l1 = 1, l2 = 2 | l1} in [f y]");
  EXPECT_EQ(print(subst(body, "f", comp)), "let [y] = {l1 = 1, l2 = 2 | l1} in [<l1 = \\x. x, l2 = \\x. x + 1 | l1> y]");
}

TEST(Subst, CommutesWithAlphaRenaming) {
  Term s = P("y + z");
  for (const auto& src : {"\\y. x y", "let [y] = [x] in [y + x]", "\\z. \\y. x z y", "{l1 = \\y. x y | l1}"}) {
    Term t = P(src);
    // rename every binder to a fresh name, then substitute
    std::function<Term(const Term&)> rename = [&](const Term& u) -> Term {
      if (const auto* a = u.as<node::Abs>()) {
        std::string fresh = a->param + "_r";
        return Term::abs(fresh, rename(subst(a->body, a->param, Term::var(fresh))));
      }
      if (const auto* l = u.as<node::LetBox>()) {
        std::string fresh = l->name + "_r";
        return Term::let_box(fresh, rename(l->bound), rename(subst(l->body, l->name, Term::var(fresh))));
      }
      auto cs = children(u);
      for (auto& c : cs) c = rename(c);
      return with_children(u, cs);
    };
    Term renamed = rename(t);
    ASSERT_TRUE(alpha_eq(t, renamed)) << src;
    EXPECT_TRUE(alpha_eq(subst(t, "x", s), subst(renamed, "x", s))) << src;
  }
}

TEST(Subst, LabelsOfResultComeFromInputs) {
  auto terms = generated_terms(100, false);
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    Term body = Term::app(Term::abs("x", terms[i]), Term::var("x"));
    Term result = subst(body, "x", terms[i + 1]);
    auto lu = label_universe(result);
    auto a = label_universe(body), b = label_universe(terms[i + 1]);
    for (const auto& l : lu) EXPECT_TRUE(a.count(l) || b.count(l));
  }
}

TEST(TermOps, ReplaceAtAndSubterms) {
  Term t = P("(\\x. x) 1");
  auto subs = subterms(t);
  ASSERT_EQ(subs.size(), 4u);
  EXPECT_EQ(subs[0], t);
  EXPECT_EQ(replace_at(t, 3, lit(2)), P("(\\x. x) 2"));
  EXPECT_EQ(term_depth(lit(1)), 1);
  EXPECT_EQ(term_size(t), 4);
  EXPECT_EQ(erase_annotations(P("[[1]@{l1}]@bot")), P("[[1]]"));
}
