#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "kdep/atoms.hpp"
#include "kdep/error.hpp"
#include "kdep/kteam.hpp"
#include "kdep/semiring.hpp"

namespace kdep {

struct Verdict {
  bool holds = true;
  std::string witness;  // empty when the atom holds
};

namespace detail {

inline std::string show_tuple(const KTeam& X, const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + X.format_val(t[i]);
  return s + ")";
}

inline std::string show_bag(const KTeam& X, const MarginalMultiset& m) {
  std::string s = "{{";
  bool first = true;
  for (const auto& [v, n] : m)
    for (std::size_t i = 0; i < n; ++i) s += (first ? "" : ",") + X.semiring().format(v), first = false;
  return s + "}}";
}

// Nonzero marginals keyed by projected tuple.
inline std::map<Tuple, Value> marginal_map(const KTeam& X, const std::vector<int>& cols) {
  auto g = group_by(X, cols);
  std::map<Tuple, Value> m;
  for (std::size_t k = 0; k < g.rep.size(); ++k)
    if (!X.semiring().is_zero(g.sum[k])) m.emplace(project(X.row(g.rep[k]), cols), g.sum[k]);
  return m;
}

}  // namespace detail

// Arithmetic the independence clause needs. Everything but the semiring itself
// goes through this so the clause can also be run over test doubles.
struct KOps {
  using V = Value;
  const Semiring* K;
  V zero() const { return K->zero(); }
  V add(const V& a, const V& b) const { return K->add(a, b); }
  V mul(const V& a, const V& b) const { return K->mul(a, b); }
  bool eq(const V& a, const V& b) const { return a == b; }
};

// ȳ ⊥_x̄ z̄ over rows with weights w. Values absent from the rows give zero
// marginals on both sides, so only value combinations seen together with a
// given x̄-value are checked; this needs nothing beyond annihilation.
template <class Ops>
bool independence_holds(const std::vector<Tuple>& rows, const std::vector<typename Ops::V>& w,
                        const std::vector<int>& xc, const std::vector<int>& yc, const std::vector<int>& zc,
                        const Ops& ops, std::string* witness = nullptr) {
  using V = typename Ops::V;
  std::map<Tuple, std::vector<std::size_t>> by_x;
  for (std::size_t i = 0; i < rows.size(); ++i) by_x[project(rows[i], xc)].push_back(i);
  for (const auto& [a, idx] : by_x) {
    V mx = ops.zero();
    std::map<Tuple, V> my, mz;
    std::map<std::pair<Tuple, Tuple>, V> myz;
    for (std::size_t i : idx) {
      Tuple b = project(rows[i], yc), c = project(rows[i], zc);
      mx = ops.add(mx, w[i]);
      auto acc = [&](auto& m, const auto& key) {
        auto it = m.find(key);
        if (it == m.end()) m.emplace(key, w[i]);
        else it->second = ops.add(it->second, w[i]);
      };
      acc(my, b);
      acc(mz, c);
      acc(myz, std::make_pair(b, c));
    }
    for (const auto& [b, vb] : my)
      for (const auto& [c, vc] : mz) {
        auto it = myz.find({b, c});
        V vbc = it == myz.end() ? ops.zero() : it->second;
        if (!ops.eq(ops.mul(vbc, mx), ops.mul(vb, vc))) {
          if (witness) {
            auto show = [](const Tuple& t) {
              std::string s;
              for (Val v : t) s += (s.empty() ? "" : ",") + std::to_string(v);
              return "(" + s + ")";
            };
            *witness = "cond=" + show(a) + " left=" + show(b) + " right=" + show(c);
          }
          return false;
        }
      }
  }
  return true;
}

inline Verdict check(const KTeam& X, const Atom& a) {
  const auto& K = X.semiring();
  const auto& D = X.schema();
  for (const auto& v : a.vars()) D.index(v);
  Verdict out;
  switch (a.kind) {
    case AtomKind::FD: {
      auto xc = D.indices(a.lhs), yc = D.indices(a.rhs);
      std::unordered_map<Tuple, std::size_t, TupleHash> first;
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (K.is_zero(X.weight(i))) continue;
        auto [it, fresh] = first.emplace(project(X.row(i), xc), i);
        if (!fresh && !same_on(X.row(i), X.row(it->second), yc)) {
          out.holds = false;
          out.witness = "rows " + detail::show_tuple(X, X.row(it->second)) + " and " +
                        detail::show_tuple(X, X.row(i)) + " agree on the left side only";
          return out;
        }
      }
      return out;
    }
    case AtomKind::IND:
    case AtomKind::MI: {
      if (a.kind == AtomKind::IND && !K.flags.totally_zero_min_ordered)
        throw CapabilityError("inclusion atoms need a totally zero-min ordered semiring");
      auto mx = detail::marginal_map(X, D.indices(a.lhs));
      auto my = detail::marginal_map(X, D.indices(a.rhs));
      auto fail = [&](const Tuple& t, const Value& l, const Value& r) {
        out.holds = false;
        out.witness = "value " + detail::show_tuple(X, t) + ": left marginal " + K.format(l) +
                      ", right marginal " + K.format(r);
        return out;
      };
      for (const auto& [t, v] : mx) {
        auto it = my.find(t);
        Value r = it == my.end() ? K.zero() : it->second;
        if (a.kind == AtomKind::IND ? !K.leq(v, r) : v != r) return fail(t, v, r);
      }
      if (a.kind == AtomKind::MI)
        for (const auto& [t, v] : my)
          if (!mx.count(t)) return fail(t, K.zero(), v);
      return out;
    }
    case AtomKind::INDStar:
    case AtomKind::MDE: {
      auto mx = multiset_of(X, D.indices(a.lhs));
      auto my = multiset_of(X, D.indices(a.rhs));
      bool ok = a.kind == AtomKind::INDStar ? multiset_included(mx, my) : mx == my;
      if (!ok) {
        out.holds = false;
        out.witness = "left " + detail::show_bag(X, mx) + ", right " + detail::show_bag(X, my);
      }
      return out;
    }
    case AtomKind::CI: {
      std::string w;
      out.holds = independence_holds(X.rows(), X.weights(), D.indices(a.cond), D.indices(a.lhs),
                                     D.indices(a.rhs), KOps{&K}, &w);
      if (!out.holds) out.witness = w;
      return out;
    }
  }
  return out;
}

inline bool satisfies(const KTeam& X, const Atom& a) { return check(X, a).holds; }

inline bool satisfies_all(const KTeam& X, const std::vector<Atom>& sigma) {
  for (const auto& a : sigma)
    if (!satisfies(X, a)) return false;
  return true;
}

}  // namespace kdep
