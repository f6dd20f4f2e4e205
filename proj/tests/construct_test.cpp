#include <gtest/gtest.h>

#include <random>

#include "kdep/construct.hpp"

using namespace kdep;

namespace {
std::vector<Atom> atoms(std::initializer_list<const char*> ts) {
  std::vector<Atom> out;
  for (auto t : ts) out.push_back(parse_atom(t));
  return out;
}
DepGraph graph_of(const std::vector<Atom>& sigma, const Schema& D) {
  return build_graph(closure(sigma, AxiomSystem::named("FD+UMI+UMDE"), D));
}
bool sat(const KTeam& X, const char* t) { return satisfies(X, parse_atom(t)); }

std::vector<Atom> random_sigma(std::mt19937_64& rng, const Schema& D, std::size_t max_atoms) {
  const auto& vs = D.vars();
  const int n = static_cast<int>(vs.size());
  std::vector<Atom> s;
  std::size_t m = rng() % (max_atoms + 1);
  for (std::size_t j = 0; j < m; ++j) {
    switch (rng() % 3) {
      case 0: {
        VarTuple l;
        for (const auto& v : vs)
          if (rng() % 3 == 0) l.push_back(v);
        s.push_back(Atom::fd(l, {vs[rng() % n]}));
        break;
      }
      case 1: s.push_back(Atom::mi({vs[rng() % n]}, {vs[rng() % n]})); break;
      default: s.push_back(Atom::mde({vs[rng() % n]}, {vs[rng() % n]})); break;
    }
  }
  return s;
}
}  // namespace

TEST(Graph, EmptyClosure) {
  auto G = graph_of({}, Schema({"x", "y"}));
  EXPECT_EQ(G.components, 2);
  for (int v = 0; v < 2; ++v) {
    EXPECT_EQ(G.black[v], detail::bit(v));
    EXPECT_EQ(G.blue[v], detail::bit(v));
    EXPECT_EQ(G.red[v], detail::bit(v));
  }
  EXPECT_TRUE(check_graph_properties(G).all_pass());
}

TEST(Graph, RedEdgeOrdersComponents) {
  auto G = graph_of(atoms({"x -> y"}), Schema({"x", "y"}));
  EXPECT_TRUE(G.red[0] >> 1 & 1);
  EXPECT_FALSE(G.red[1] >> 0 & 1);
  EXPECT_LT(G.scc_number[0], G.scc_number[1]);
}

TEST(Graph, MiGivesBlackAndBlue) {
  auto G = graph_of(atoms({"x == y"}), Schema({"x", "y"}));
  EXPECT_TRUE(G.black[0] >> 1 & 1);
  EXPECT_TRUE(G.blue[0] >> 1 & 1);
  EXPECT_EQ(G.components, 1);
  EXPECT_EQ(DepGraph::cliques(G.blue, {0, 1}).size(), 1u);
  EXPECT_TRUE(check_graph_properties(graph_of(atoms({"x == y", "y -> z"}), Schema({"x", "y", "z"}))).all_pass());
}

TEST(Graph, MissingSelfLoop) {
  EXPECT_THROW(build_graph(atoms({"x -> x", "x == x"}), Schema({"x"})), PreconditionError);
  auto G = graph_of({}, Schema({"x", "y"}));
  G.blue[1] = 0;
  auto rep = check_graph_properties(G);
  const auto* c = rep.find("self-loops");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->holds);
  EXPECT_NE(c->witness.find("blue"), std::string::npos);
}

TEST(Graph, BrokenTransitivityIsReported) {
  auto G = graph_of(atoms({"x -> y", "y -> z"}), Schema({"x", "y", "z"}));
  G.red[0] &= ~detail::bit(2);
  EXPECT_FALSE(check_graph_properties(G).find("transitively closed")->holds);
}

TEST(Graph, Dot) {
  auto dot = to_dot(graph_of(atoms({"x -> y", "y -> x", "y == z"}), Schema({"x", "y", "z"})));
  EXPECT_NE(dot.find("\"x\" -> \"y\" [color=red, dir=none]"), std::string::npos);
  EXPECT_EQ(dot.find("\"y\" -> \"x\""), std::string::npos);
  EXPECT_NE(dot.find("style=dashed"), std::string::npos);
  EXPECT_EQ(dot.find("\"x\" -> \"x\""), std::string::npos);
}

TEST(Graph, PropertiesOnRandomClosures) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 100; ++it) {
    Schema D({"a", "b", "c", "d"});
    auto rep = check_graph_properties(graph_of(random_sigma(rng, D, 5), D));
    for (const auto& c : rep.checks) ASSERT_TRUE(c.pass()) << c.law << ": " << c.witness;
  }
}

TEST(Armstrong, EmptySigma) {
  auto X = armstrong_fd_umi_umde({}, Schema({"x", "y"}), Semiring::naturals());
  for (const char* t : {"x -> y", "y -> x", "x == y", "x =* y", "const(x)", "const(y)"}) EXPECT_FALSE(sat(X, t)) << t;
  EXPECT_TRUE(sat(X, "x -> x"));
  EXPECT_TRUE(sat(X, "x == x"));
}

TEST(Armstrong, Constants) {
  auto X = armstrong_fd_umi_umde(atoms({"const(x)", "const(y)"}), Schema({"x", "y"}), Semiring::naturals());
  EXPECT_TRUE(sat(X, "x =* y"));
  EXPECT_TRUE(sat(X, "const(x)"));
  EXPECT_TRUE(sat(X, "const(y)"));
  auto Y = armstrong_fd_umi_umde(atoms({"const(x)"}), Schema({"x", "y"}), Semiring::naturals());
  EXPECT_EQ(value_set(Y, {"x"}).size(), 1u);
  EXPECT_FALSE(sat(Y, "const(y)"));
}

TEST(Armstrong, MiOverThree) {
  auto X = armstrong_fd_umi_umde(atoms({"x == y"}), Schema({"x", "y", "z"}), Semiring::nnrationals());
  EXPECT_TRUE(sat(X, "x == y"));
  EXPECT_TRUE(sat(X, "x =* y"));
  EXPECT_FALSE(sat(X, "x == z"));
  EXPECT_TRUE(armstrong_sweep(X, atoms({"x == y"})).exact());
}

TEST(Armstrong, Gating) {
  EXPECT_THROW(armstrong_fd_umi_umde(atoms({"x <= y"}), Schema({"x", "y"}), Semiring::naturals()), ClassError);
  EXPECT_THROW(armstrong_fd_umi_umde({}, Schema({"x"}), Semiring::boolean()), CapabilityError);
}

TEST(Armstrong, ExactOnRandomSigma) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 60; ++it) {
    VarTuple vs;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) vs.push_back(std::string(1, static_cast<char>('a' + i)));
    Schema D(vs);
    auto sigma = random_sigma(rng, D, 6);
    auto X = armstrong_fd_umi_umde(sigma, D, Semiring::naturals());
    auto r = armstrong_sweep(X, sigma);
    ASSERT_TRUE(r.exact()) << "first mismatch " << print(r.mismatches.front());
    for (const auto& w : X.weights()) ASSERT_FALSE(X.semiring().is_zero(w));
  }
}

// Columns joined by black edges carry equal marginal bags, blue ones equal
// multiplicity multisets.
TEST(Armstrong, CliqueColumnsShareBags) {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 60; ++it) {
    Schema D({"a", "b", "c", "d"});
    auto sigma = random_sigma(rng, D, 5);
    auto X = armstrong_fd_umi_umde(sigma, D, Semiring::naturals());
    auto G = graph_of(sigma, D);
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v) {
        const auto &x = D.vars()[u], &y = D.vars()[v];
        if (G.blue[u] >> v & 1) {
          ASSERT_EQ(marginal_multiset(X, {x}), marginal_multiset(X, {y}));
        }
        if (G.black[u] >> v & 1) {
          for (int val = 0; val < 12; ++val) ASSERT_EQ(marginal(X, {x}, {val}), marginal(X, {y}, {val}));
        }
      }
  }
}

TEST(Counterexample, UindStarTropical) {
  const auto& T = Semiring::tropical();
  auto X = counterexample({}, parse_atom("x <* y"), T);
  ASSERT_EQ(X.size(), 2u);
  EXPECT_EQ(X.row(0), (Tuple{0, 0}));
  EXPECT_EQ(X.weight(0), T.make(0));
  EXPECT_EQ(X.row(1), (Tuple{1, 0}));
  EXPECT_EQ(X.weight(1), T.make(1));
}

TEST(Counterexample, UmiSingleRow) {
  const auto& Q = Semiring::nnrationals();
  auto X = counterexample({}, parse_atom("x == y"), Q);
  ASSERT_EQ(X.size(), 1u);
  EXPECT_EQ(X.row(0), (Tuple{0, 1}));
  EXPECT_EQ(X.weight(0), Q.one());
}

TEST(Counterexample, BooleanSearchLifted) {
  auto X = counterexample(atoms({"x <= y"}), parse_atom("y <= x"), Semiring::boolean());
  EXPECT_EQ(X.size(), 2u);
  EXPECT_TRUE(sat(X, "x <= y"));
  EXPECT_FALSE(sat(X, "y <= x"));
  auto V = counterexample(atoms({"x <= y"}), parse_atom("y <= x"), Semiring::viterbi());
  for (const auto& w : V.weights()) EXPECT_EQ(w, Semiring::viterbi().one());
}

TEST(Counterexample, IaCases) {
  const auto& Q = Semiring::nnrationals();
  auto X = counterexample(atoms({"x _||_ y"}), parse_atom("x _||_ y z"), Q);
  EXPECT_TRUE(sat(X, "x _||_ y"));
  EXPECT_FALSE(sat(X, "x _||_ y z"));
  auto C = counterexample(atoms({"x =* y"}), parse_atom("const(x)"), Q);
  EXPECT_FALSE(sat(C, "const(x)"));
  // x and y joined by =* but not ==: the witness must keep the MI apart.
  auto M = counterexample(atoms({"x =* y", "x _||_ z"}), parse_atom("x == y"), Q);
  EXPECT_FALSE(sat(M, "x == y"));
  EXPECT_TRUE(sat(M, "x =* y"));
}

TEST(Counterexample, ArmstrongRoute) {
  auto X = counterexample(atoms({"x -> y"}), parse_atom("y -> x"), Semiring::naturals());
  EXPECT_TRUE(sat(X, "x -> y"));
  EXPECT_FALSE(sat(X, "y -> x"));
}

TEST(Counterexample, Preconditions) {
  EXPECT_THROW(counterexample(atoms({"x -> y"}), parse_atom("x -> y"), Semiring::naturals()), PreconditionError);
  EXPECT_THROW(counterexample(atoms({"x -> y", "x y <= u v"}), parse_atom("u -> v"), Semiring::boolean()),
               ClassError);
}

TEST(Counterexample, AttachAndBounds) {
  auto d = implies(atoms({"x <= y"}), parse_atom("y <= x"), Semiring::boolean());
  attach_counterexample(d);
  ASSERT_TRUE(d.counterexample.has_value());
  EXPECT_TRUE(d.to_json().contains("counterexample"));
  // With one value no Boolean team can separate them.
  auto e = implies(atoms({"x <= y"}), parse_atom("y <= x"), Semiring::boolean());
  attach_counterexample(e, {{1, 1, {}}});
  EXPECT_FALSE(e.counterexample.has_value());
  EXPECT_NE(e.counterexample_error.find("witness not found"), std::string::npos);
  EXPECT_THROW(build_counterexample(e, Semiring::boolean(), {{1, 1, {}}}), SearchExhausted);
}

TEST(Table1, Instances) {
  const auto& N = Semiring::naturals();
  auto X = table1_team(N, N.make(1), N.make(1), N.make(3));
  EXPECT_EQ(X.size(), 3u);
  EXPECT_TRUE(sat(X, "x <= v"));
  const auto& B = Semiring::boolean();
  auto Y = table1_team(B, B.one(), B.zero(), B.one());
  // x = 1 carries weight 1 while y = 1 carries none.
  EXPECT_TRUE(sat(Y, "y <= x"));
  EXPECT_FALSE(sat(Y, "x <= y"));
}

TEST(Counterexample, MiWithEveryUnaryPairDerivable) {
  // Each unary pair of the goal follows, yet the binary identity does not;
  // the smallest witness needs seven rows.
  auto sigma = atoms({"c == a", "b c == b a", "a c == c b"});
  auto tau = parse_atom("a b == b a");
  for (auto id : kAllSemirings) {
    const auto& K = Semiring::get(id);
    auto d = implies(sigma, tau, K);
    ASSERT_EQ(d.answer, Answer::No) << K.name;
    auto X = build_counterexample(d, K, {});
    EXPECT_TRUE(satisfies_all(X, sigma)) << K.name;
    EXPECT_FALSE(satisfies(X, tau)) << K.name;
  }
}
