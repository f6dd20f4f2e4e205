#include <gtest/gtest.h>

#include "kdep/construct.hpp"
#include "kdep/semantics.hpp"

using namespace kdep;

namespace {
KTeam nat113() {
  const auto& N = Semiring::naturals();
  return table1_team(N, N.make(1), N.make(1), N.make(3));
}
}  // namespace

TEST(Semantics, FourteenJudgments) {
  auto X = nat113();
  const std::vector<std::pair<const char*, bool>> cases = {
      {"x -> z", true},    {"x -> y", false},   {"const(w)", true},  {"const(z)", false}, {"x <= v", true},
      {"x == v", true},    {"x <= z", false},   {"x == z", false},   {"x <* z", true},    {"x =* z", true},
      {"x <* w", false},   {"x =* w", false},   {"x _||_ w", true},  {"y _||_ x | w", false}};
  for (const auto& [text, expect] : cases) {
    auto v = check(X, parse_atom(text));
    EXPECT_EQ(v.holds, expect) << text;
    EXPECT_EQ(v.witness.empty(), expect) << text << ": " << v.witness;
  }
}

TEST(Semantics, SatisfiesAll) {
  auto X = nat113();
  EXPECT_TRUE(satisfies_all(X, {}));
  EXPECT_TRUE(satisfies_all(X, {parse_atom("x -> z"), parse_atom("const(w)")}));
  EXPECT_FALSE(satisfies_all(X, {parse_atom("x -> z"), parse_atom("x -> y")}));
}

TEST(Semantics, SchemaIsChecked) { EXPECT_THROW(check(nat113(), parse_atom("q -> x")), SchemaError); }

// With a + b = a, b nonzero and c zero, the Viterbi team separates the two
// directions of an IND*.
TEST(Semantics, ViterbiAbsorption) {
  const auto& V = Semiring::viterbi();
  auto X = table1_team(V, V.one(), V.make(1, 2), V.zero());
  EXPECT_TRUE(satisfies(X, parse_atom("x <* y")));
  EXPECT_FALSE(satisfies(X, parse_atom("y <* x")));
}

TEST(Semantics, BooleanIndIsNotSymmetric) {
  const auto& B = Semiring::boolean();
  KTeam X(Schema({"x", "y"}), B);
  X.add_row({0, 0}, B.one());
  X.add_row({0, 1}, B.one());
  EXPECT_TRUE(satisfies(X, parse_atom("x <= y")));
  EXPECT_FALSE(satisfies(X, parse_atom("y <= x")));
  EXPECT_FALSE(satisfies(X, parse_atom("x == y")));
  EXPECT_TRUE(satisfies(X, parse_atom("x <* y")));
}

TEST(Semantics, ZeroWeightRowsAreIgnored) {
  const auto& N = Semiring::naturals();
  KTeam X(Schema({"x", "y"}), N);
  X.add_row({0, 0}, N.one());
  X.add_row({0, 1}, N.zero());
  EXPECT_TRUE(satisfies(X, parse_atom("x -> y")));
  EXPECT_TRUE(satisfies(X, parse_atom("const(y)")));
}

TEST(Semantics, EmptyTeamSatisfiesEverything) {
  KTeam X(Schema({"x", "y", "z"}), Semiring::nnrationals());
  for (const char* t : {"x -> y", "x <= y", "x == y", "x <* y", "x =* y", "x _||_ y | z", "const(x)"})
    EXPECT_TRUE(satisfies(X, parse_atom(t))) << t;
}

TEST(Semantics, IndependenceOverRationals) {
  const auto& Q = Semiring::nnrationals();
  KTeam X(Schema({"x", "y"}), Q);
  X.add_row({0, 0}, Q.make(1, 2));
  X.add_row({0, 1}, Q.make(1));
  X.add_row({1, 0}, Q.make(1));
  X.add_row({1, 1}, Q.make(2));
  EXPECT_TRUE(satisfies(X, parse_atom("x _||_ y")));
  X = KTeam(Schema({"x", "y"}), Q);
  X.add_row({0, 0}, Q.make(1));
  X.add_row({1, 1}, Q.make(1));
  EXPECT_FALSE(satisfies(X, parse_atom("x _||_ y")));
}

TEST(Semantics, TropicalMarginalsUseMin) {
  const auto& T = Semiring::tropical();
  KTeam X(Schema({"x", "y"}), T);
  X.add_row({0, 0}, T.make(0));
  X.add_row({1, 0}, T.make(1));
  // y = 0 has marginal min(0, 1) = 0; x has values 0 and 1 with marginals 0, 1.
  EXPECT_FALSE(satisfies(X, parse_atom("x <* y")));
  EXPECT_TRUE(satisfies(X, parse_atom("y <* x")));
}
