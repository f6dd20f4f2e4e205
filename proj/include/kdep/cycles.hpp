#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kdep/atoms.hpp"

namespace kdep {

enum class CycleFlavor { UIND, UMI, UMDE };

inline const char* flavor_name(CycleFlavor f) {
  switch (f) {
    case CycleFlavor::UIND: return "UIND";
    case CycleFlavor::UMI: return "UMI";
    case CycleFlavor::UMDE: return "UMDE";
  }
  return "?";
}

namespace detail {

// Alternating cycles over vertices 0..n-1. A state is 2*v + p where p = 0 at
// positions that start an FD step and p = 1 at positions that start a
// dependency step. An FD =(u,v) is the edge (u,0) -> (v,1). A dependency pair
// (a,b) is the edge (b,1) -> (a,0) for a <= b and (a,1) -> (b,0) for a == b or
// a =* b, matching the premises of the cycle rules. A closed walk from an even
// position back to itself has an even number of edges 2m, i.e. it is an
// instance of (2m-1)-CYCLE, possibly with repeated variables.
struct CycleConclusion {
  AtomKind kind;  // FD, IND or MDE
  int a, b;       // =(a,b), a <= b or a =* b
  int k;          // odd cycle length parameter
  std::vector<int> fd_premises, dep_premises;  // indices into the input lists
};

struct PEdge {
  int to;
  bool fd;
  int idx;
};

inline std::vector<CycleConclusion> cycle_conclusions(int n, const std::vector<std::pair<int, int>>& fds,
                                                      const std::vector<std::pair<int, int>>& deps,
                                                      CycleFlavor flavor, bool walks = true) {
  const int S = 2 * n;
  std::vector<std::vector<PEdge>> adj(S);
  auto dep_edge = [&](const std::pair<int, int>& d) {
    return flavor == CycleFlavor::UIND ? std::make_pair(2 * d.second + 1, 2 * d.first)
                                       : std::make_pair(2 * d.first + 1, 2 * d.second);
  };
  for (std::size_t i = 0; i < fds.size(); ++i)
    adj[2 * fds[i].first].push_back({2 * fds[i].second + 1, true, static_cast<int>(i)});
  for (std::size_t i = 0; i < deps.size(); ++i) {
    auto [from, to] = dep_edge(deps[i]);
    adj[from].push_back({to, false, static_cast<int>(i)});
  }

  // Tarjan, recursive; S is at most twice the number of variables.
  std::vector<int> comp(S, -1), low(S), num(S, -1), stack;
  std::vector<char> on(S, 0);
  int counter = 0, ncomp = 0;
  auto strong = [&](auto&& self, int v) -> void {
    num[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = 1;
    for (const auto& e : adj[v]) {
      if (num[e.to] < 0) {
        self(self, e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on[e.to]) {
        low[v] = std::min(low[v], num[e.to]);
      }
    }
    if (low[v] == num[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < S; ++v)
    if (num[v] < 0) strong(strong, v);

  // Shortest path from `from` to `to` inside one component, as edge list.
  auto walk = [&](int from, int to, std::vector<int>& fdp, std::vector<int>& depp) {
    std::vector<int> prev_state(S, -2);
    std::vector<PEdge> prev_edge(S);
    std::deque<int> q{from};
    prev_state[from] = -1;
    while (!q.empty() && prev_state[to] == -2) {
      int v = q.front();
      q.pop_front();
      for (const auto& e : adj[v])
        if (prev_state[e.to] == -2 && comp[e.to] == comp[from]) {
          prev_state[e.to] = v;
          prev_edge[e.to] = e;
          q.push_back(e.to);
        }
    }
    int steps = 0;
    for (int v = to; v != from; v = prev_state[v]) {
      const auto& e = prev_edge[v];
      (e.fd ? fdp : depp).push_back(e.idx);
      ++steps;
    }
    return steps;
  };

  std::vector<CycleConclusion> out;
  auto close_edge = [&](int from, int to, bool fd, int idx) {
    CycleConclusion c{};
    (fd ? c.fd_premises : c.dep_premises).push_back(idx);
    if (walks) c.k = walk(to, from, c.fd_premises, c.dep_premises);  // edges - 1
    std::sort(c.fd_premises.begin(), c.fd_premises.end());
    c.fd_premises.erase(std::unique(c.fd_premises.begin(), c.fd_premises.end()), c.fd_premises.end());
    std::sort(c.dep_premises.begin(), c.dep_premises.end());
    c.dep_premises.erase(std::unique(c.dep_premises.begin(), c.dep_premises.end()), c.dep_premises.end());
    return c;
  };
  for (std::size_t i = 0; i < fds.size(); ++i) {
    int from = 2 * fds[i].first, to = 2 * fds[i].second + 1;
    if (comp[from] != comp[to]) continue;
    CycleConclusion c = close_edge(from, to, true, static_cast<int>(i));
    c.kind = AtomKind::FD;
    c.a = fds[i].second;
    c.b = fds[i].first;
    out.push_back(c);
    if (flavor == CycleFlavor::UMDE) {
      c.kind = AtomKind::MDE;
      c.a = fds[i].first;
      c.b = fds[i].second;
      out.push_back(c);
    }
  }
  if (flavor == CycleFlavor::UIND)
    for (std::size_t i = 0; i < deps.size(); ++i) {
      auto [from, to] = dep_edge(deps[i]);
      if (comp[from] != comp[to]) continue;
      CycleConclusion c = close_edge(from, to, false, static_cast<int>(i));
      c.kind = AtomKind::IND;
      c.a = deps[i].second;
      c.b = deps[i].first;
      out.push_back(c);
    }
  return out;
}

}  // namespace detail

// Conclusions of every cycle-rule instance whose premises are among the given
// unary FDs =(u,v) and dependency pairs (a,b), read as a <= b, a == b or
// a =* b according to the flavor.
inline std::vector<Atom> detect_cycles(const std::vector<std::pair<Var, Var>>& fd_pairs,
                                       const std::vector<std::pair<Var, Var>>& dep_pairs, CycleFlavor flavor) {
  std::map<Var, int> id;
  std::vector<Var> name;
  auto get = [&](const Var& v) {
    auto [it, fresh] = id.emplace(v, static_cast<int>(name.size()));
    if (fresh) name.push_back(v);
    return it->second;
  };
  std::vector<std::pair<int, int>> f, d;
  for (const auto& [u, v] : fd_pairs) f.emplace_back(get(u), get(v));
  for (const auto& [u, v] : dep_pairs) d.emplace_back(get(u), get(v));
  std::set<Atom> out;
  for (const auto& c : detail::cycle_conclusions(static_cast<int>(name.size()), f, d, flavor)) {
    const Var &a = name[c.a], &b = name[c.b];
    switch (c.kind) {
      case AtomKind::FD: out.insert(canonicalize(Atom::fd({a}, {b}))); break;
      case AtomKind::IND: out.insert(canonicalize(Atom::ind({a}, {b}))); break;
      default: out.insert(canonicalize(Atom::mde({a}, {b}))); break;
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace kdep
