#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kdep/atoms.hpp"
#include "kdep/axioms.hpp"
#include "kdep/closure.hpp"
#include "kdep/error.hpp"
#include "kdep/inference.hpp"
#include "kdep/kteam.hpp"
#include "kdep/oracle.hpp"
#include "kdep/report.hpp"
#include "kdep/semantics.hpp"
#include "kdep/semiring.hpp"

namespace kdep {

// Three-colour graph of a closure over FDs, UMIs and UMDEs. Edge sets are bit
// rows: black[u] has bit v when u == v is in the closure, blue for u =* v and
// red for =(u, v). A pair of opposite red edges is the undirected red edge.
struct DepGraph {
  Schema D;
  std::vector<detail::Mask> black, blue, red;
  // closed[C] is the set of variables C determines, indexed by the bit mask
  // of C. Empty when the graph was built by hand.
  std::vector<detail::Mask> closed;
  std::vector<int> scc;         // component id per vertex
  std::vector<int> scc_number;  // position of the vertex's component in the order
  int components = 0;

  int n() const { return static_cast<int>(D.size()); }
  bool red_undirected(int u, int v) const { return (red[u] >> v & 1) && (red[v] >> u & 1); }

  // Vertices grouped by component, in ascending scc_number.
  std::vector<std::vector<int>> ordered_components() const {
    std::vector<std::vector<int>> out(components);
    for (int v = 0; v < n(); ++v) out[scc_number[v]].push_back(v);
    return out;
  }

  // Classes of the relation given by rows inside one vertex list, each sorted,
  // ordered by least vertex.
  static std::vector<std::vector<int>> cliques(const std::vector<detail::Mask>& rel, const std::vector<int>& vs) {
    std::vector<std::vector<int>> out;
    std::vector<char> used(rel.size(), 0);
    for (int v : vs) {
      if (used[v]) continue;
      std::vector<int> c;
      for (int u : vs)
        if (!used[u] && (u == v || ((rel[v] >> u & 1) && (rel[u] >> v & 1)))) c.push_back(u), used[u] = 1;
      out.push_back(c);
    }
    return out;
  }

  // Strongly connected components of the union of all colours, numbered so
  // that every edge between components goes up. Ties go to the component
  // with the least vertex.
  void number_components() {
    const int N = n();
    std::vector<detail::Mask> reach(N);
    for (int u = 0; u < N; ++u) reach[u] = black[u] | blue[u] | red[u] | detail::bit(u);
    // Black and blue edges are undirected.
    for (int u = 0; u < N; ++u)
      for (int v = 0; v < N; ++v)
        if ((black[u] | blue[u]) >> v & 1) reach[v] |= detail::bit(u);
    for (int k = 0; k < N; ++k)
      for (int u = 0; u < N; ++u)
        if (reach[u] >> k & 1) reach[u] |= reach[k];
    scc.assign(N, -1);
    components = 0;
    std::vector<detail::Mask> members;
    for (int u = 0; u < N; ++u) {
      if (scc[u] >= 0) continue;
      detail::Mask m = 0;
      for (int v = 0; v < N; ++v)
        if ((reach[u] >> v & 1) && (reach[v] >> u & 1)) scc[v] = components, m |= detail::bit(v);
      members.push_back(m);
      ++components;
    }
    // Kahn over the condensation; components are already indexed by least vertex.
    std::vector<int> indeg(components, 0), num(components, -1);
    std::vector<detail::Mask> succ(components, 0);
    for (int u = 0; u < N; ++u)
      for (int v = 0; v < N; ++v)
        if ((reach[u] >> v & 1) && scc[u] != scc[v]) succ[scc[u]] |= detail::bit(scc[v]);
    for (int c = 0; c < components; ++c)
      for (int d = 0; d < components; ++d)
        if (succ[c] >> d & 1) ++indeg[d];
    for (int next = 0; next < components; ++next) {
      int pick = -1;
      for (int c = 0; c < components && pick < 0; ++c)
        if (num[c] < 0 && indeg[c] == 0) pick = c;
      num[pick] = next;
      for (int d = 0; d < components; ++d)
        if (succ[pick] >> d & 1) --indeg[d];
    }
    scc_number.assign(N, 0);
    for (int u = 0; u < N; ++u) scc_number[u] = num[scc[u]];
  }
};

namespace detail {

inline void require_self_loops(const DepGraph& G) {
  for (int v = 0; v < G.n(); ++v) {
    const char* miss = !(G.black[v] >> v & 1) ? "black" : !(G.blue[v] >> v & 1) ? "blue"
                     : !(G.red[v] >> v & 1)   ? "red"
                                              : nullptr;
    if (miss)
      throw PreconditionError("the atom set is not a closure: vertex " + G.D.vars()[v] + " has no " + miss +
                              " self-loop");
  }
}

inline constexpr int kMaxGraphVars = 16;

}  // namespace detail

inline DepGraph build_graph(const std::vector<Atom>& delta, const Schema& D) {
  const int N = static_cast<int>(D.size());
  if (N > detail::kMaxGraphVars) throw CapabilityError("graphs are built for at most 16 variables");
  DepGraph G;
  G.D = D;
  G.black.assign(N, 0);
  G.blue.assign(N, 0);
  G.red.assign(N, 0);
  G.closed.assign(std::size_t(1) << N, 0);
  for (const auto& a : delta) {
    Atom c = canonicalize(a);
    switch (c.kind) {
      case AtomKind::MI:
      case AtomKind::MDE:
        if (c.unary()) {
          int u = D.index(c.lhs[0]), v = D.index(c.rhs[0]);
          auto& rel = c.kind == AtomKind::MI ? G.black : G.blue;
          rel[u] |= detail::bit(v);
          rel[v] |= detail::bit(u);
        }
        break;
      case AtomKind::FD: {
        detail::Mask l = detail::mask_of(c.lhs, D), r = detail::mask_of(c.rhs, D);
        G.closed[l] |= r;
        if (c.lhs.size() == 1)
          for (const auto& y : c.rhs) G.red[D.index(c.lhs[0])] |= detail::bit(D.index(y));
        break;
      }
      default:
        break;
    }
  }
  for (std::size_t C = 0; C < G.closed.size(); ++C) G.closed[C] |= C;
  detail::require_self_loops(G);
  G.number_components();
  return G;
}

// Same graph read off a closure object, either engine.
inline DepGraph build_graph(const Closure& cl) {
  const Schema& D = cl.schema();
  const int N = static_cast<int>(D.size());
  if (N > detail::kMaxGraphVars) throw CapabilityError("graphs are built for at most 16 variables");
  const auto& vs = D.vars();
  DepGraph G;
  G.D = D;
  G.black.assign(N, 0);
  G.blue.assign(N, 0);
  G.red.assign(N, 0);
  G.closed.assign(std::size_t(1) << N, 0);
  for (int u = 0; u < N; ++u)
    for (int v = 0; v < N; ++v) {
      if (cl.contains(Atom::mi({vs[u]}, {vs[v]}))) G.black[u] |= detail::bit(v);
      if (cl.contains(Atom::mde({vs[u]}, {vs[v]}))) G.blue[u] |= detail::bit(v);
    }
  for (std::size_t C = 0; C < G.closed.size(); ++C) {
    auto lhs = detail::vars_of_mask(C, D);
    detail::Mask m = C;
    for (int y = 0; y < N; ++y)
      if (!(m >> y & 1) && cl.contains(Atom::fd(lhs, {vs[y]}))) m |= detail::bit(y);
    G.closed[C] = m;
  }
  for (int u = 0; u < N; ++u) G.red[u] = G.closed[detail::bit(u)];
  detail::require_self_loops(G);
  G.number_components();
  return G;
}

inline LawReport check_graph_properties(const DepGraph& G) {
  LawReport rep;
  rep.subject = "dependency graph";
  const int N = G.n();
  const auto& name = G.D.vars();
  auto has = [](const std::vector<detail::Mask>& rel, int u, int v) { return (rel[u] >> v & 1) != 0; };
  const std::vector<std::pair<const char*, const std::vector<detail::Mask>*>> colours = {
      {"black", &G.black}, {"blue", &G.blue}, {"red", &G.red}};

  LawCheck loops{"self-loops", true, std::nullopt, ""};
  for (int v = 0; v < N && loops.holds; ++v)
    for (const auto& [c, rel] : colours)
      if (!has(*rel, v, v)) {
        loops.holds = false;
        loops.witness = "vertex " + name[v] + " has no " + c + " self-loop";
        break;
      }
  rep.checks.push_back(loops);

  LawCheck trans{"transitively closed", true, std::nullopt, ""};
  for (const auto& [c, rel] : colours)
    for (int u = 0; u < N && trans.holds; ++u)
      for (int v = 0; v < N && trans.holds; ++v)
        for (int w = 0; w < N && trans.holds; ++w)
          if (has(*rel, u, v) && has(*rel, v, w) && !has(*rel, u, w)) {
            trans.holds = false;
            trans.witness = std::string(c) + " edges " + name[u] + "-" + name[v] + " and " + name[v] + "-" + name[w] +
                            " without " + name[u] + "-" + name[w];
          }
  rep.checks.push_back(trans);

  LawCheck sub{"black within blue", true, std::nullopt, ""};
  for (int u = 0; u < N && sub.holds; ++u)
    for (int v = 0; v < N && sub.holds; ++v)
      if (has(G.black, u, v) && !has(G.blue, u, v)) {
        sub.holds = false;
        sub.witness = "black edge " + name[u] + "-" + name[v] + " is not blue";
      }
  rep.checks.push_back(sub);

  // Inside a component every colour is symmetric, hence (with the two checks
  // above) a partition into cliques, and blue joins everything.
  LawCheck comp{"components undirected", true, std::nullopt, ""};
  for (int u = 0; u < N && comp.holds; ++u)
    for (int v = 0; v < N && comp.holds; ++v) {
      if (G.scc[u] != G.scc[v]) continue;
      for (const auto& [c, rel] : colours)
        if (has(*rel, u, v) != has(*rel, v, u)) {
          comp.holds = false;
          comp.witness = std::string(c) + " edge between " + name[u] + " and " + name[v] + " has one direction only";
          break;
        }
      if (comp.holds && !has(G.blue, u, v)) {
        comp.holds = false;
        comp.witness = name[u] + " and " + name[v] + " share a component but no blue edge";
      }
    }
  rep.checks.push_back(comp);

  LawCheck anc{"common red ancestor", true, std::nullopt, ""};
  if (G.closed.size() == (std::size_t(1) << N)) {
    for (std::size_t C = 1; C < G.closed.size() && anc.holds; ++C)
      for (int z = 0; z < N && anc.holds; ++z) {
        if ((G.red[z] & C) != C) continue;
        detail::Mask miss = G.closed[C] & ~G.red[z];
        if (miss) {
          anc.holds = false;
          anc.witness = name[z] + " is a red ancestor of {" + detail::join(detail::vars_of_mask(C, G.D)) +
                        "}, which determines " + name[detail::low_bit(miss)] + ", but has no red edge to it";
        }
      }
  } else {
    anc.witness = "no FD table; nothing to check";
  }
  rep.checks.push_back(anc);

  LawCheck order{"component numbering", true, std::nullopt, ""};
  for (int u = 0; u < N && order.holds; ++u)
    for (int v = 0; v < N && order.holds; ++v)
      if (has(G.red, u, v) && G.scc[u] != G.scc[v] && G.scc_number[u] >= G.scc_number[v]) {
        order.holds = false;
        order.witness = "red edge " + name[u] + " -> " + name[v] + " goes from component " +
                        std::to_string(G.scc_number[u]) + " to " + std::to_string(G.scc_number[v]);
      }
  rep.checks.push_back(order);
  return rep;
}

// Self-loops are left out. Opposite red edges are drawn once, undirected.
inline std::string to_dot(const DepGraph& G) {
  std::ostringstream out;
  const auto& name = G.D.vars();
  out << "digraph G {\n";
  for (int v = 0; v < G.n(); ++v)
    out << "  \"" << name[v] << "\" [label=\"" << name[v] << " (" << G.scc_number[v] << ")\"];\n";
  for (int u = 0; u < G.n(); ++u)
    for (int v = 0; v < G.n(); ++v) {
      if (u == v) continue;
      auto e = [&](const char* attrs) { out << "  \"" << name[u] << "\" -> \"" << name[v] << "\" [" << attrs << "];\n"; };
      if (u < v && (G.black[u] >> v & 1)) e("color=black, dir=none");
      if (u < v && (G.blue[u] >> v & 1)) e("color=blue, style=dashed, dir=none");
      if (G.red[u] >> v & 1) {
        if (!G.red_undirected(u, v)) e("color=red");
        else if (u < v) e("color=red, dir=none");
      }
    }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Armstrong team for FDs, UMIs and UMDEs

namespace detail {

inline void require_class(const std::vector<Atom>& atoms, const std::string& cls, const Schema& D) {
  for (const auto& a : atoms)
    if (!class_admits(cls, a, D)) throw ClassError(print(a) + " is outside class " + cls);
}

// A row under construction: -1 marks an empty position.
using Pattern = std::vector<int>;

inline Pattern zero_pattern(Mask zeros, int n) {
  Pattern p(n, -1);
  for (int v = 0; v < n; ++v)
    if (zeros >> v & 1) p[v] = 0;
  return p;
}

}  // namespace detail

// The team satisfies exactly the FDs, UMIs and UMDEs over D in the closure
// of sigma. All weights are one; rows that come out identical are merged and
// carry their multiplicity as weight.
inline KTeam armstrong_fd_umi_umde(const std::vector<Atom>& sigma, const Schema& D, const Semiring& K) {
  detail::require_class(sigma, "FD+UMI+UMDE", D);
  if (!K.flags.additively_cancellative)
    throw CapabilityError("the Armstrong construction needs an additively cancellative semiring; " + K.name +
                          " is not");
  std::vector<Atom> canon;
  for (const auto& a : sigma) canon.push_back(canonicalize(a));
  DepGraph G = build_graph(closure(canon, AxiomSystem::named("FD+UMI+UMDE"), D));
  const int N = G.n();
  const detail::Mask full = N == 64 ? ~detail::Mask(0) : (detail::bit(N) - 1);
  std::vector<detail::Pattern> rows;
  auto count = [&](int v) {
    int c = 0;
    for (const auto& r : rows) c += r[v] == 0;
    return c;
  };

  // Sets of two or more variables that do not determine everything.
  for (std::size_t C = 0; C < G.closed.size(); ++C)
    if (detail::popc(C) >= 2 && G.closed[C] != full) rows.push_back(detail::zero_pattern(G.closed[C], N));
  rows.push_back(detail::zero_pattern(full, N));

  const auto comps = G.ordered_components();
  const detail::Mask consts = G.closed[0];
  int prev = 0;  // largest count reached by an earlier component
  for (const auto& comp : comps) {
    auto reds = DepGraph::cliques(G.red, comp);
    for (const auto& k : reds) rows.push_back(detail::zero_pattern(G.closed[detail::bit(k[0])], N));
    int target = prev + 1;
    for (const auto& k : reds) target = std::max(target, count(k[0]));
    for (const auto& k : reds)
      for (int c = count(k[0]); c < target; ++c) rows.push_back(detail::zero_pattern(G.closed[detail::bit(k[0])], N));
    prev = target;
  }
  if (consts == 0) rows.push_back(detail::zero_pattern(0, N));

  // Fill empty positions column by column: 1, ..., d-1 and then d + k for the
  // k-th black clique of the component.
  for (const auto& comp : comps) {
    auto blacks = DepGraph::cliques(G.black, comp);
    for (std::size_t k = 0; k < blacks.size(); ++k)
      for (int v : blacks[k]) {
        int d = 0;
        for (const auto& r : rows) d += r[v] < 0;
        int next = 1;
        for (auto& r : rows) {
          if (r[v] >= 0) continue;
          r[v] = next == d ? d + static_cast<int>(k) : next;
          ++next;
        }
        if (consts >> v & 1)
          for (auto& r : rows)
            if (r[v] == 0) r[v] = static_cast<int>(k);
      }
  }

  std::map<Tuple, std::size_t> mult;
  std::vector<Tuple> order;
  for (const auto& r : rows) {
    for (int x : r)
      if (x < 0) throw Error("internal", "Armstrong team still has an empty position");
    if (mult[r]++ == 0) order.push_back(r);
  }
  KTeam X(D, K);
  for (const auto& t : order) {
    Value w = K.zero();
    for (std::size_t i = 0; i < mult[t]; ++i) w = K.add(w, K.one());
    X.add_row(t, w);
  }
  return X;
}

// Every FD, unary MI and unary MDE over D, trivial ones included, in a fixed
// order: FDs by left-side mask then right variable, then MIs, then MDEs.
inline std::vector<Atom> fd_umi_umde_atoms(const Schema& D) {
  const int N = static_cast<int>(D.size());
  if (N > detail::kMaxGraphVars) throw CapabilityError("atom sweeps are limited to 16 variables");
  const auto& vs = D.vars();
  std::vector<Atom> out;
  for (detail::Mask C = 0; C < detail::bit(N); ++C)
    for (int y = 0; y < N; ++y) out.push_back(canonicalize(Atom::fd(detail::vars_of_mask(C, D), {vs[y]})));
  for (int u = 0; u < N; ++u)
    for (int v = u; v < N; ++v) out.push_back(canonicalize(Atom::mi({vs[u]}, {vs[v]})));
  for (int u = 0; u < N; ++u)
    for (int v = u; v < N; ++v) out.push_back(canonicalize(Atom::mde({vs[u]}, {vs[v]})));
  return out;
}

struct SweepResult {
  std::size_t checked = 0;
  std::vector<Atom> violated;    // atoms the team fails, all outside the closure when exact
  std::vector<Atom> mismatches;  // team and closure disagree
  bool exact() const { return mismatches.empty(); }
};

// Compares a team with the closure of sigma on every class atom over D.
inline SweepResult armstrong_sweep(const KTeam& X, const std::vector<Atom>& sigma) {
  const Schema& D = X.schema();
  auto cl = closure(sigma, AxiomSystem::named("FD+UMI+UMDE"), D);
  SweepResult r;
  for (const auto& a : fd_umi_umde_atoms(D)) {
    ++r.checked;
    bool team = satisfies(X, a);
    if (!team) r.violated.push_back(a);
    if (team != cl.contains(a)) r.mismatches.push_back(a);
  }
  return r;
}

// The three-row team over x, y, z, v, w used to separate atom kinds.
inline KTeam table1_team(const Semiring& K, const Value& a, const Value& b, const Value& c) {
  KTeam X(Schema({"x", "y", "z", "v", "w"}), K);
  X.add_row({0, 0, 1, 0, 0}, a);
  X.add_row({0, 1, 1, 0, 0}, b);
  X.add_row({1, 0, 0, 1, 0}, c);
  return X;
}

// ---------------------------------------------------------------------------
// Counterexamples

// Boolean search bounds tried in turn; cheap spaces first.
inline std::vector<SearchBounds> default_search_plan(std::size_t max_rows = 6, std::size_t max_values = 3) {
  std::vector<SearchBounds> plan;
  for (std::size_t v = 2; v <= max_values; ++v)
    for (std::size_t r : {std::size_t(2), std::size_t(4), max_rows})
      if (r <= max_rows && (plan.empty() || plan.back().max_rows != r || plan.back().max_values != v))
        plan.push_back({r, v, {}});
  return plan;
}

namespace detail {

inline std::optional<KTeam> search(const std::vector<Atom>& sigma, const Atom& tau, const Semiring& K,
                                   const Schema& D, const std::vector<SearchBounds>& plan) {
  for (const auto& b : plan)
    if (auto X = refute(sigma, tau, K, b, D)) return X;
  return std::nullopt;
}

inline std::string plan_text(const std::vector<SearchBounds>& plan) {
  if (plan.empty()) return "no bounds";
  return "rows <= " + std::to_string(plan.back().max_rows) + ", values <= " + std::to_string(plan.back().max_values);
}

inline KTeam uniform_team(const Schema& D, const Semiring& K, const std::vector<Tuple>& rows) {
  KTeam X(D, K);
  for (const auto& r : rows) X.add_row(r, K.one());
  return X;
}

// Variables v with the atom built by rel(x, v) in the closure.
template <class F>
Mask related(const Closure& cl, const Schema& D, F rel) {
  Mask m = 0;
  for (int v = 0; v < static_cast<int>(D.size()); ++v)
    if (cl.contains(rel(D.vars()[v]))) m |= bit(v);
  return m;
}

// All rows with value 0 outside `free` and 0/1 on `free`.
inline std::vector<Tuple> product_rows(int n, Mask free) {
  std::vector<int> fv;
  for (int v = 0; v < n; ++v)
    if (free >> v & 1) fv.push_back(v);
  std::vector<Tuple> rows;
  for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << fv.size()); ++bits) {
    Tuple t(n, 0);
    for (std::size_t i = 0; i < fv.size(); ++i) t[fv[i]] = static_cast<Val>(bits >> i & 1);
    rows.push_back(t);
  }
  return rows;
}

// Phase-one simplex with Bland's rule, exact: finds w >= 0 with A w = b
// (b >= 0) or reports infeasibility.
inline std::optional<std::vector<Rational>> feasible_point(std::vector<std::vector<Rational>> A,
                                                            std::vector<Rational> b) {
  const std::size_t m = A.size(), n = m ? A[0].size() : 0;
  // Columns: originals, then one artificial per row.
  std::vector<std::vector<Rational>> T(m, std::vector<Rational>(n + m));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1;
    basis[i] = n + i;
  }
  std::vector<Rational> cost(n + m, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) cost[j] -= T[i][j];
  for (;;) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m && enter == n + m; ++j)
      if (cost[j] < 0) enter = j;
    if (enter == n + m) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      Rational r = b[i] / T[i][enter];
      if (leave == m || r < best || (r == best && basis[i] < basis[leave])) leave = i, best = r;
    }
    if (leave == m) break;  // unbounded direction; cannot happen for a phase-one objective
    Rational piv = T[leave][enter];
    for (auto& v : T[leave]) v /= piv;
    b[leave] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      Rational f = T[i][enter];
      for (std::size_t j = 0; j < n + m; ++j) T[i][j] -= f * T[leave][j];
      b[i] -= f * b[leave];
    }
    Rational f = cost[enter];
    for (std::size_t j = 0; j < n + m; ++j) cost[j] -= f * T[leave][j];
    basis[leave] = enter;
  }
  std::vector<Rational> w(n, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) {
      if (b[i] != 0) return std::nullopt;
    } else {
      w[basis[i]] = b[i];
    }
  }
  return w;
}

// n * one(K), by doubling.
inline Value times_one(const Semiring& K, boost::multiprecision::cpp_int n) {
  Value acc = K.zero(), p = K.one();
  while (n > 0) {
    if (n & 1) acc = K.add(acc, p);
    p = K.add(p, p);
    n >>= 1;
  }
  return acc;
}

// Witness for a failed MI goal x ~ y whose unary pairs may all be derivable.
// Over values {0..V-1} it looks for natural weights satisfying every premise
// with X[x](a) > 0 and X[y](a) = 0; the equalities survive the map n -> n*1 and
// the zero/nonzero gap survives in any positive semiring.
inline std::optional<KTeam> mi_lp_witness(const std::vector<Atom>& sigma, const Atom& goal, const Semiring& K,
                                          const Schema& D) {
  const int N = static_cast<int>(D.size());
  const std::size_t k = goal.lhs.size();
  auto positions = [&](const VarTuple& vs) {
    std::vector<int> p;
    for (const auto& v : vs) p.push_back(D.index(v));
    return p;
  };
  const auto gx = positions(goal.lhs), gy = positions(goal.rhs);
  for (int V = 2; V <= 4; ++V) {
    std::size_t cells = 1;
    for (int i = 0; i < N; ++i) cells *= V;
    if (cells > 729) break;
    std::vector<Tuple> all;
    for (std::size_t c = 0; c < cells; ++c) {
      Tuple t(N);
      std::size_t r = c;
      for (int i = 0; i < N; ++i) t[i] = static_cast<Val>(r % V), r /= V;
      all.push_back(t);
    }
    auto proj = [](const Tuple& t, const std::vector<int>& p) {
      Tuple o;
      for (int i : p) o.push_back(t[i]);
      return o;
    };
    // Relabelling values is a symmetry, so a only ranges over first-occurrence forms.
    std::vector<Tuple> targets;
    std::vector<Val> cur;
    std::function<void(Val)> grow = [&](Val top) {
      if (cur.size() == k) return targets.push_back(cur);
      for (Val v = 0; v <= std::min<Val>(top + 1, V - 1); ++v) {
        cur.push_back(v);
        grow(std::max(top, v));
        cur.pop_back();
      }
    };
    grow(-1);
    for (const auto& a : targets) {
      std::vector<Tuple> cols;
      for (const auto& t : all)
        if (proj(t, gy) != a) cols.push_back(t);
      std::vector<std::vector<Rational>> A;
      std::vector<Rational> b;
      for (const auto& s : sigma) {
        const auto px = positions(s.lhs), py = positions(s.rhs);
        std::map<Tuple, std::vector<Rational>> rows;
        for (std::size_t j = 0; j < cols.size(); ++j) {
          auto& rx = rows[proj(cols[j], px)];
          rx.resize(cols.size());
          rx[j] += 1;
          auto& ry = rows[proj(cols[j], py)];
          ry.resize(cols.size());
          ry[j] -= 1;
        }
        for (auto& [key, row] : rows) {
          if (std::any_of(row.begin(), row.end(), [](const Rational& q) { return q != 0; })) {
            A.push_back(std::move(row));
            b.push_back(0);
          }
        }
      }
      std::vector<Rational> target(cols.size(), 0);
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (proj(cols[j], gx) == a) target[j] = 1;
      A.push_back(target);
      b.push_back(1);
      auto w = feasible_point(A, b);
      if (!w) continue;
      boost::multiprecision::cpp_int scale = 1;
      for (const auto& q : *w)
        if (q != 0) scale = boost::multiprecision::lcm(scale, boost::multiprecision::denominator(q));
      KTeam X(D, K);
      for (std::size_t j = 0; j < cols.size(); ++j)
        if ((*w)[j] != 0) X.add_row(cols[j], times_one(K, boost::multiprecision::numerator(Rational((*w)[j] * scale))));
      return X;
    }
  }
  return std::nullopt;
}

inline KTeam ia_uca_umi_umde_witness(const Decision& dec, const Closure& cl, const Semiring& K) {
  const Schema& D = dec.schema;
  const int N = static_cast<int>(D.size());
  const Atom& g = *dec.failed_goal;
  const Mask all = bit(N) - 1;
  if (g.kind == AtomKind::MI) {
    // One row: 0 on the MI-class of x, 1 elsewhere.
    Var x = g.lhs[0];
    Mask z = related(cl, D, [&](const Var& v) { return Atom::mi({x}, {v}); });
    Tuple t(N);
    for (int v = 0; v < N; ++v) t[v] = (z >> v & 1) ? 0 : 1;
    return uniform_team(D, K, {t});
  }
  if (g.kind == AtomKind::MDE || g.kind == AtomKind::FD) {
    // Free 0/1 columns on the =*-class of a non-constant x, constant 0 elsewhere.
    Var x = g.kind == AtomKind::FD ? g.rhs[0] : g.lhs[0];
    if (g.kind == AtomKind::MDE && cl.contains(Atom::ca({x}))) x = g.rhs[0];
    Mask z = related(cl, D, [&](const Var& v) { return Atom::mde({x}, {v}); });
    return uniform_team(D, K, product_rows(N, z));
  }
  // Independence: shrink to a minimal non-derivable atom, then a parity team.
  VarTuple xs = g.lhs, ys = g.rhs;
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (int side = 0; side < 2 && !shrunk; ++side) {
      auto& t = side ? ys : xs;
      for (std::size_t i = 0; i < t.size() && !shrunk; ++i) {
        VarTuple t2 = t;
        t2.erase(t2.begin() + static_cast<long>(i));
        VarTuple a = side ? xs : t2, b = side ? t2 : ys;
        if (!a.empty() && !b.empty() && !cl.contains(canonicalize(Atom::ia(a, b)))) t = t2, shrunk = true;
      }
    }
  }
  Mask u = related(cl, D, [&](const Var& v) { return Atom::ca({v}); });
  int x1 = D.index(xs[0]);
  std::vector<int> parity;
  for (std::size_t i = 1; i < xs.size(); ++i) parity.push_back(D.index(xs[i]));
  for (const auto& y : ys) parity.push_back(D.index(y));
  auto rows = product_rows(N, all & ~u & ~bit(x1));
  for (auto& t : rows) {
    int s = 0;
    for (int p : parity) s += t[p];
    t[x1] = s % 2;
  }
  return uniform_team(D, K, rows);
}

}  // namespace detail

// Builds and checks a witness for a "no" decision. Throws SearchExhausted
// when a search-based class finds nothing inside the plan.
inline KTeam build_counterexample(const Decision& dec, const Semiring& K,
                                  const std::vector<SearchBounds>& plan = default_search_plan()) {
  if (dec.answer != Answer::No || !dec.failed_goal)
    throw PreconditionError("counterexamples exist only for implications that fail");
  const Schema& D = dec.schema;
  const Atom& goal = *dec.failed_goal;
  const std::string& sys = dec.system;
  std::optional<KTeam> X;
  if (sys == "FD+UMI+UMDE") {
    X = armstrong_fd_umi_umde(dec.sigma, D, K);
  } else if (sys == "IA+UCA+UMI+UMDE") {
    auto cl = closure(dec.sigma, AxiomSystem::named(sys), D);
    X = detail::ia_uca_umi_umde_witness(dec, cl, K);
  } else if (sys == "UINDStar") {
    auto pair = K.absorbing_pair();
    if (!pair) throw CapabilityError(K.name + " has no nonzero a, b with a + b = a in its pool");
    auto cl = closure(dec.sigma, AxiomSystem::named(sys), D);
    const Var& x = goal.lhs[0];
    detail::Mask z = detail::related(cl, D, [&](const Var& v) { return Atom::ind_star({x}, {v}); });
    const int N = static_cast<int>(D.size());
    Tuple s(N, 0), s1(N, 0);
    for (int v = 0; v < N; ++v) s1[v] = (z >> v & 1) ? 1 : 0;
    KTeam T(D, K);
    T.add_row(s, pair->first);
    T.add_row(s1, pair->second);
    X = T;
  } else if (sys == "MI") {
    auto cl = closure(dec.sigma, AxiomSystem::named(sys), D);
    for (std::size_t i = 0; i < goal.lhs.size() && !X; ++i) {
      const Var &x = goal.lhs[i], &y = goal.rhs[i];
      if (cl.contains(canonicalize(Atom::mi({x}, {y})))) continue;
      detail::Mask z = detail::related(cl, D, [&](const Var& v) { return canonicalize(Atom::mi({x}, {v})); });
      Tuple t(D.size());
      for (std::size_t v = 0; v < D.size(); ++v) t[v] = (z >> v & 1) ? 0 : 1;
      X = detail::uniform_team(D, K, {t});
    }
    if (!X) X = detail::mi_lp_witness(dec.sigma, goal, K, D);
    if (!X) X = detail::search(dec.sigma, goal, K, D, plan);
    if (!X) throw SearchExhausted("witness not found within bounds (" + detail::plan_text(plan) + ")");
  } else if (sys == "SCI+FD" || sys == "IND" || sys == "FD+UIND+SCI" || sys == "UFD+UIND+IA") {
    const auto& B = Semiring::boolean();
    auto found = detail::search(dec.sigma, goal, B, D, plan);
    if (!found) throw SearchExhausted("witness not found within bounds (" + detail::plan_text(plan) + ")");
    auto k = sys == "SCI+FD" ? std::optional<Value>(K.one()) : K.idempotent_nonzero();
    if (!k) throw CapabilityError(K.name + " has no idempotent nonzero element");
    X = lift_boolean(*found, *k, K);
  } else {
    throw ClassError("no counterexample construction for system " + sys);
  }
  if (!satisfies_all(*X, dec.input_sigma) || satisfies(*X, dec.input_tau))
    throw Error("internal", "constructed team does not separate the premises from the goal");
  return *X;
}

// Decides and, on "no", builds the witness.
inline KTeam counterexample(const std::vector<Atom>& sigma, const Atom& tau, const Semiring& K,
                            const std::vector<SearchBounds>& plan = default_search_plan()) {
  Decision dec = implies(sigma, tau, K);
  if (dec.answer == Answer::Yes) throw PreconditionError("the implication holds; there is no counterexample");
  if (dec.answer == Answer::Unsupported) throw ClassError(dec.reason);
  return build_counterexample(dec, K, plan);
}

// Fills dec.counterexample, or dec.counterexample_error when the search gives up.
inline void attach_counterexample(Decision& dec, const std::vector<SearchBounds>& plan = default_search_plan()) {
  if (dec.answer != Answer::No) return;
  try {
    dec.counterexample = build_counterexample(dec, Semiring::get(dec.semiring_id), plan);
  } catch (const SearchExhausted& e) {
    dec.counterexample_error = e.what();
  }
}

}  // namespace kdep
