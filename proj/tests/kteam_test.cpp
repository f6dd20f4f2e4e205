#include <gtest/gtest.h>

#include <sstream>

#include "kdep/kteam.hpp"

using namespace kdep;

namespace {

// Three rows over x y z v w with weights a, b, c.
KTeam fixture(const Semiring& K, const Value& a, const Value& b, const Value& c) {
  KTeam X(Schema({"x", "y", "z", "v", "w"}), K);
  X.add_row({0, 0, 1, 0, 0}, a);
  X.add_row({0, 1, 1, 0, 0}, b);
  X.add_row({1, 0, 0, 1, 0}, c);
  return X;
}

KTeam nat113() {
  const auto& N = Semiring::naturals();
  return fixture(N, N.make(1), N.make(1), N.make(3));
}

}  // namespace

TEST(KTeam, SupportKeepsNonzeroRows) {
  EXPECT_EQ(support(nat113()).size(), 3u);
  const auto& N = Semiring::naturals();
  EXPECT_TRUE(support(fixture(N, N.zero(), N.zero(), N.zero())).empty());
  const auto& T = Semiring::tropical();
  KTeam U(Schema({"x", "y"}), T);
  U.add_row({0, 0}, T.make(0));
  U.add_row({1, 0}, T.make(1));
  EXPECT_EQ(support(U).size(), 2u);
  U.add_row({1, 1}, T.zero());
  EXPECT_EQ(support(U).size(), 2u);
}

TEST(KTeam, Marginals) {
  auto X = nat113();
  const auto& N = Semiring::naturals();
  EXPECT_EQ(marginal(X, {"x"}, {0}), N.make(2));
  EXPECT_EQ(marginal(X, {"w"}, {0}), N.make(5));
  EXPECT_EQ(marginal(X, {"w"}, {1}), N.zero());
  EXPECT_EQ(marginal(X, {"x", "y"}, {0, 1}), N.make(1));
  EXPECT_THROW(marginal(X, {"x"}, {0, 1}), ArityError);
  EXPECT_THROW(marginal(X, {"q"}, {0}), SchemaError);
}

TEST(KTeam, TotalWeight) {
  EXPECT_EQ(total_weight(nat113()), Semiring::naturals().make(5));
  KTeam E(Schema({"x"}), Semiring::naturals());
  EXPECT_EQ(total_weight(E), Semiring::naturals().zero());
  const auto& B = Semiring::boolean();
  EXPECT_EQ(total_weight(fixture(B, B.one(), B.one(), B.zero())), B.one());
}

TEST(KTeam, ValueSets) {
  auto X = nat113();
  EXPECT_EQ(value_set(X, {"x"}), (std::set<Tuple>{{0}, {1}}));
  EXPECT_EQ(value_set(X, {"w"}), (std::set<Tuple>{{0}}));
  const auto& N = Semiring::naturals();
  EXPECT_TRUE(value_set(fixture(N, N.zero(), N.zero(), N.zero()), {"x"}).empty());
}

TEST(KTeam, MarginalMultisets) {
  auto X = nat113();
  const auto& N = Semiring::naturals();
  MarginalMultiset mx{{N.make(2), 1}, {N.make(3), 1}};
  EXPECT_EQ(marginal_multiset(X, {"x"}), mx);
  MarginalMultiset mw{{N.make(5), 1}};
  EXPECT_EQ(marginal_multiset(X, {"w"}), mw);
  KTeam one(Schema({"x"}), N);
  one.add_row({4}, N.one());
  EXPECT_EQ(marginal_multiset(one, {"x"}), (MarginalMultiset{{N.one(), 1}}));
  EXPECT_TRUE(multiset_included(mw, mw));
  EXPECT_FALSE(multiset_included(mx, mw));
}

TEST(KTeam, Normalize) {
  const auto& Q = Semiring::nnrationals();
  auto X = normalize(fixture(Q, Q.make(1), Q.make(1), Q.make(3)));
  EXPECT_EQ(X.weight(0), Q.make(1, 5));
  EXPECT_EQ(X.weight(2), Q.make(3, 5));
  auto Y = normalize(X);
  EXPECT_EQ(Y.weights(), X.weights());
  KTeam two(Schema({"x"}), Q);
  two.add_row({0}, Q.make(2));
  two.add_row({1}, Q.make(2));
  EXPECT_EQ(normalize(two).weight(1), Q.make(1, 2));
  EXPECT_THROW(normalize(nat113()), CapabilityError);
  KTeam zero(Schema({"x"}), Q);
  EXPECT_THROW(normalize(zero), DegenerateInput);
}

TEST(KTeam, LiftBoolean) {
  const auto& B = Semiring::boolean();
  KTeam b(Schema({"x", "y"}), B);
  b.add_row({0, 0}, B.one());
  b.add_row({0, 1}, B.one());
  b.add_row({1, 1}, B.zero());
  const auto& V = Semiring::viterbi();
  auto X = lift_boolean(b, V.one(), V);
  ASSERT_EQ(X.size(), 2u);
  EXPECT_EQ(X.weight(1), V.one());
  const auto& T = Semiring::tropical();
  auto Y = lift_boolean(b, T.make(0), T);
  for (const auto& w : Y.weights()) EXPECT_EQ(w, T.make(0));
  KTeam e(Schema({"x"}), B);
  EXPECT_EQ(lift_boolean(e, V.one(), V).size(), 0u);
  EXPECT_THROW(lift_boolean(b, V.zero(), V), PreconditionError);
  EXPECT_THROW(lift_boolean(X, V.one(), V), TypeError);
}

TEST(KTeam, RowChecks) {
  const auto& N = Semiring::naturals();
  KTeam X(Schema({"x", "y"}), N);
  X.add_row({0, 0}, N.one());
  EXPECT_THROW(X.add_row({0, 0}, N.one()), SchemaError);
  EXPECT_THROW(X.add_row({0}, N.one()), ArityError);
  EXPECT_THROW(X.add_row({1, 0}, Semiring::boolean().one()), TypeError);
  EXPECT_THROW(Schema({"x", "x"}), SchemaError);
}

TEST(KTeam, TsvRoundTrip) {
  std::istringstream in("x\ty\t#weight\n0\ta\t1/2\nb\ta\t3\n");
  auto X = read_tsv(in, Semiring::nnrationals());
  ASSERT_EQ(X.size(), 2u);
  EXPECT_EQ(X.format_val(X.row(1)[0]), "b");
  EXPECT_EQ(X.row(0)[1], X.row(1)[1]);
  std::string text = to_tsv(X);
  EXPECT_EQ(text, "x\ty\t#weight\n0\ta\t1/2\nb\ta\t3\n");
  std::istringstream again(text);
  EXPECT_EQ(read_tsv(again, Semiring::nnrationals()).weights(), X.weights());
}

TEST(KTeam, TsvErrors) {
  std::istringstream no_weight("x\ty\n0\t0\n");
  EXPECT_THROW(read_tsv(no_weight, Semiring::naturals()), ParseError);
  std::istringstream short_row("x\ty\t#weight\n0\t1\n");
  EXPECT_THROW(read_tsv(short_row, Semiring::naturals()), ParseError);
  std::istringstream bad_weight("x\t#weight\n0\t1/2\n");
  EXPECT_THROW(read_tsv(bad_weight, Semiring::naturals()), TypeError);
  std::istringstream tropical("x\t#weight\n0\tinf\n");
  EXPECT_TRUE(Semiring::tropical().is_zero(read_tsv(tropical, Semiring::tropical()).weight(0)));
}

TEST(KTeam, GroupBy) {
  auto X = nat113();
  auto g = group_by(X, X.schema().indices({"z"}));
  ASSERT_EQ(g.rep.size(), 2u);
  EXPECT_EQ(g.of_row[0], g.of_row[1]);
  EXPECT_EQ(g.sum[g.of_row[0]], Semiring::naturals().make(2));
}
