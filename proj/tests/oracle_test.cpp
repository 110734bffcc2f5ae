#include <gtest/gtest.h>

#include "oracle/agreement.hpp"
#include "support.hpp"

using namespace vl;
using namespace vl::test;

TEST(Oracle, Basics) {
  oracle::Oracle o;
  EXPECT_TRUE(o.admits(P("1 + 0"), Int()));
  EXPECT_TRUE(o.admits(P("[1]"), Box(R({"l1"}), Int())));
  EXPECT_TRUE(o.admits(P("[1]"), Box(bot(), Int())));
  EXPECT_FALSE(o.derivable(P("\\x. 1")));
  EXPECT_FALSE(o.derivable(P("\\x. x + x")));
  EXPECT_FALSE(o.derivable(P("[1]@{l1}.l2")));
  EXPECT_TRUE(o.admits(P("\\x. x"), Fn(Box(R({"l2"}), Int()), Box(R({"l2"}), Int()))));
  EXPECT_FALSE(o.admits(P("\\x. x"), Fn(Int(), Box(R({"l2"}), Int()))));
  EXPECT_TRUE(o.admits(P("let [x] = {l1 = 0 | l1} in [x]"), Box(R({"l1"}), Int())));
  EXPECT_FALSE(o.admits(P("let [x] = {l1 = 0 | l1} in [x]"), Box(R({"l1", "l2"}), Int())));
  // the record scales the inner demand on x up to {l1,l2}
  EXPECT_FALSE(o.admits(P("let [x] = {l1 = 0 | l1} in {l2 = [x] | l2}"), Box(R({"l2"}), Box(R({"l1"}), Int()))));
}

TEST(Oracle, NestedPromotionClassifier) {
  EXPECT_TRUE(oracle::nested_unannotated_promotion(P("[[1]]")));
  EXPECT_TRUE(oracle::nested_unannotated_promotion(P("[[1]@{l1}]")));
  EXPECT_TRUE(oracle::nested_unannotated_promotion(P("[[1]]@{l1}")));
  EXPECT_FALSE(oracle::nested_unannotated_promotion(P("[[1]@{l1}]@{l2}")));
  EXPECT_FALSE(oracle::nested_unannotated_promotion(P("[1] [2]")));
}

TEST(Agreement, SmallExhaustiveSpace) {
  oracle::Space space;
  space.max_size = 6;
  std::vector<std::string> logged;
  auto a = oracle::compare(space, [&](const std::string& s) { logged.push_back(s); });
  for (const auto& s : a.samples) ADD_FAILURE() << s;
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.permitted, static_cast<long>(logged.size()));
  EXPECT_GT(a.terms, 10000);
  EXPECT_GT(a.checker_accepts, 1000);
  EXPECT_EQ(a.checker_accepts, a.oracle_accepts - a.permitted);
}

TEST(Agreement, UnannotatedSize7) {
  oracle::Space space;
  space.max_size = 7;
  space.annotations = false;
  auto a = oracle::compare(space);
  for (const auto& s : a.samples) ADD_FAILURE() << s;
  EXPECT_TRUE(a.ok());
}
