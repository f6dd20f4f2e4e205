#include <gtest/gtest.h>

#include "kdep/construct.hpp"
#include "kdep/oracle.hpp"

using namespace kdep;

namespace {
const Atom& xy() {
  static const Atom a = parse_atom("x <= y");
  return a;
}
const Atom& yx() {
  static const Atom a = parse_atom("y <= x");
  return a;
}
}  // namespace

TEST(Refute, BooleanWitnessIsTheFirstTeam) {
  const auto& B = Semiring::boolean();
  auto X = refute({xy()}, yx(), B, {2, 2, {B.zero(), B.one()}});
  ASSERT_TRUE(X.has_value());
  ASSERT_EQ(X->size(), 2u);
  EXPECT_EQ(X->row(0), (Tuple{0, 0}));
  EXPECT_EQ(X->row(1), (Tuple{0, 1}));
  EXPECT_EQ(X->weight(0), B.one());
}

TEST(Refute, CancellativeSemiringsHaveNoWitness) {
  const auto& N = Semiring::naturals();
  EXPECT_FALSE(refute({xy()}, yx(), N, {3, 2, {N.make(0), N.make(1), N.make(2), N.make(3)}}).has_value());
  EXPECT_FALSE(refute({xy()}, yx(), Semiring::nnrationals(), {3, 2, {}}).has_value());
  EXPECT_TRUE(refute({xy()}, yx(), Semiring::tropical(), {3, 2, {}}).has_value());
  EXPECT_TRUE(refute({xy()}, yx(), Semiring::viterbi(), {3, 2, {}}).has_value());
}

TEST(Refute, ReflexivityNeverFails) {
  for (auto id : kAllSemirings)
    EXPECT_FALSE(refute({}, parse_atom("x -> x"), Semiring::get(id), {4, 3, {}}).has_value());
}

TEST(Refute, MonotoneInBounds) {
  const std::vector<std::pair<std::vector<Atom>, Atom>> cases = {
      {{xy()}, yx()},
      {{parse_atom("x -> y")}, parse_atom("y -> x")},
      {{}, parse_atom("x _||_ y")},
      {{parse_atom("x <* y")}, parse_atom("y <* x")}};
  for (const auto& [s, t] : cases)
    for (auto id : kAllSemirings) {
      const auto& K = Semiring::get(id);
      if (!refute(s, t, K, {2, 2, {}})) continue;
      EXPECT_TRUE(refute(s, t, K, {3, 2, {}}).has_value()) << K.name << " " << print(t);
      EXPECT_TRUE(refute(s, t, K, {3, 3, {}}).has_value()) << K.name << " " << print(t);
    }
}

TEST(Refute, WitnessesAreVerified) {
  const auto& T = Semiring::tropical();
  auto X = refute({parse_atom("x <= y"), parse_atom("y -> z")}, parse_atom("z <= x"), T, {4, 3, {}});
  ASSERT_TRUE(X.has_value());
  EXPECT_TRUE(satisfies(*X, parse_atom("x <= y")));
  EXPECT_FALSE(satisfies(*X, parse_atom("z <= x")));
}

TEST(Refute, ForeignPoolValue) {
  EXPECT_THROW(refute({}, xy(), Semiring::naturals(), {2, 2, {Semiring::boolean().one()}}), TypeError);
}

TEST(RandomTeam, Deterministic) {
  const Schema D({"a", "b", "c"});
  const auto& Q = Semiring::nnrationals();
  EXPECT_EQ(to_tsv(random_team(Q, D, {4, 3, {}}, 42)), to_tsv(random_team(Q, D, {4, 3, {}}, 42)));
}

TEST(RandomTeam, PoolAndEmpty) {
  const Schema D({"a", "b"});
  const auto& N = Semiring::naturals();
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto X = random_team(N, D, {4, 2, {N.one()}}, s);
    EXPECT_EQ(support(X).size(), X.size());
    EXPECT_GE(X.size(), 1u);
    EXPECT_LE(X.size(), 4u);
  }
  EXPECT_EQ(random_team(N, D, {0, 2, {}}, 1).size(), 0u);
}

TEST(Instances, PremisesAndConclusionsAreWellFormed) {
  for (std::size_t r = 0; r < kRuleCount; ++r)
    for (std::uint64_t s = 0; s < 40; ++s) {
      auto I = random_instance(static_cast<Rule>(r), s);
      ASSERT_FALSE(I.conclusions.empty()) << rule_name(static_cast<Rule>(r));
      for (const auto* side : {&I.premises, &I.conclusions})
        for (const auto& a : *side)
          for (const auto& v : a.vars()) ASSERT_TRUE(I.schema.contains(v)) << rule_name(static_cast<Rule>(r));
    }
}

TEST(Fuzz, FdOverTropical) {
  auto rep = soundness_fuzz(AxiomSystem::named("FD"), Semiring::tropical(), 1000, 3);
  EXPECT_TRUE(rep.missing.empty());
  EXPECT_EQ(rep.violations(), 0u);
  for (const auto& r : rep.rules) EXPECT_EQ(r.trials, 1000u);
}

TEST(Fuzz, IaOverRationals) {
  auto rep = soundness_fuzz(AxiomSystem::named("IA"), Semiring::nnrationals(), 1000, 4);
  EXPECT_EQ(rep.violations(), 0u);
  for (const auto& r : rep.rules) EXPECT_GT(r.hits, 0u) << r.rule;
}

TEST(Fuzz, CycleFlavors) {
  for (Rule r : {Rule::CYCLE_UIND, Rule::CYCLE_UMI, Rule::CYCLE_UMDE}) {
    auto st = fuzz_rule(r, Semiring::boolean(), 300, 9);
    EXPECT_TRUE(st.violations.empty()) << st.rule;
    EXPECT_GT(st.hits, 0u);
  }
}

// Every built-in semiring meets every rule's precondition, so the check runs
// on a copy with the flag cleared.
TEST(Fuzz, MissingPreconditionsStopTheRun) {
  Semiring K = Semiring::nnrationals();
  K.flags.multiplicatively_cancellative = false;
  auto rep = soundness_fuzz(AxiomSystem::named("IA"), K, 10, 1);
  EXPECT_EQ(rep.missing, std::vector<std::string>{"multiplicatively_cancellative"});
  EXPECT_TRUE(rep.rules.empty());
}

TEST(Fuzz, NegativeControlBreaks) {
  auto st = noncommutative_ia2_control(500, 17);
  EXPECT_GT(st.violations.size(), 0u);
  EXPECT_FALSE(st.violations.front().team_tsv.empty());
}

TEST(Fuzz, ReportJson) {
  auto rep = soundness_fuzz(AxiomSystem::named("UFD"), Semiring::viterbi(), 20, 2);
  auto j = rep.to_json();
  EXPECT_EQ(j["system"], "UFD");
  EXPECT_EQ(j["violations"], 0);
  ASSERT_EQ(j["rules"].size(), rep.rules.size());
  EXPECT_TRUE(j["rules"][0].contains("hit_rate"));
}
