#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdep/atoms.hpp"
#include "kdep/axioms.hpp"
#include "kdep/error.hpp"
#include "kdep/kteam.hpp"
#include "kdep/semantics.hpp"
#include "kdep/semiring.hpp"

namespace kdep {

// Search space of a bounded refutation. An empty pool means the semiring's
// own sample pool.
struct SearchBounds {
  std::size_t max_rows = 3;
  std::size_t max_values = 2;
  std::vector<Value> weight_pool;
};

namespace detail {

struct Compiled {
  AtomKind kind;
  std::vector<int> l, r, c;
};

inline Compiled compile(const Atom& a, const Schema& D) {
  return {a.kind, D.indices(a.lhs), D.indices(a.rhs), D.indices(a.cond)};
}

// Plain doubles, exact as long as every weight is a dyadic rational with a
// small numerator and denominator: sums of a few rows and one product of two
// such sums stay far inside the 53-bit mantissa.
struct FastArith {
  using W = double;
  SemiringId id;
  W zero() const { return id == SemiringId::Tropical ? std::numeric_limits<double>::infinity() : 0.0; }
  W add(W a, W b) const {
    switch (id) {
      case SemiringId::Naturals:
      case SemiringId::NonNegRationals: return a + b;
      case SemiringId::Tropical: return std::min(a, b);
      default: return std::max(a, b);
    }
  }
  W mul(W a, W b) const {
    switch (id) {
      case SemiringId::Boolean: return std::min(a, b);
      case SemiringId::Tropical: return a + b;
      default: return a * b;
    }
  }
  bool leq(W a, W b) const { return id == SemiringId::Tropical ? b <= a : a <= b; }
  bool is_zero(W a) const { return a == zero(); }
  bool less(W a, W b) const { return a < b; }

  static bool exact_for(const std::vector<Value>& pool) {
    for (const auto& v : pool) {
      if (v.is_inf()) continue;
      BigInt n = abs(numerator(v.q())), d = denominator(v.q());
      if (n > 4096 || d > 256 || (d & (d - 1)) != 0) return false;
    }
    return true;
  }
  static W of(const Value& v) {
    if (v.is_inf()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(numerator(v.q())) / static_cast<double>(denominator(v.q()));
  }
};

struct ExactArith {
  using W = Value;
  const Semiring* K;
  W zero() const { return K->zero(); }
  W add(const W& a, const W& b) const { return K->add(a, b); }
  W mul(const W& a, const W& b) const { return K->mul(a, b); }
  bool leq(const W& a, const W& b) const { return K->leq(a, b); }
  bool is_zero(const W& a) const { return K->is_zero(a); }
  bool less(const W& a, const W& b) const { return Value::KeyLess{}(a, b); }
  static const W& of(const Value& v) { return v; }
};

inline bool same_cols(const Tuple& a, const std::vector<int>& ca, const Tuple& b, const std::vector<int>& cb) {
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (a[ca[i]] != b[cb[i]]) return false;
  return true;
}

// Direct evaluation over a handful of rows, quadratic in the row count but
// allocation-light. The reference evaluator in semantics.hpp stays the
// authority; refute re-checks every witness with it.
template <class A>
bool small_holds(const Compiled& a, const std::vector<const Tuple*>& rows, const std::vector<typename A::W>& w,
                 const A& ar) {
  using W = typename A::W;
  const std::size_t n = rows.size();
  switch (a.kind) {
    case AtomKind::FD:
      for (std::size_t i = 0; i < n; ++i) {
        if (ar.is_zero(w[i])) continue;
        for (std::size_t j = i + 1; j < n; ++j)
          if (!ar.is_zero(w[j]) && same_cols(*rows[i], a.l, *rows[j], a.l) &&
              !same_cols(*rows[i], a.r, *rows[j], a.r))
            return false;
      }
      return true;
    case AtomKind::IND:
    case AtomKind::MI: {
      const bool mi = a.kind == AtomKind::MI;
      for (int side = 0; side < (mi ? 2 : 1); ++side) {
        const auto& own = side ? a.r : a.l;
        const auto& other = side ? a.l : a.r;
        for (std::size_t i = 0; i < n; ++i) {
          W s = ar.zero(), t = ar.zero();
          for (std::size_t j = 0; j < n; ++j) {
            if (same_cols(*rows[j], own, *rows[i], own)) s = ar.add(s, w[j]);
            if (same_cols(*rows[j], other, *rows[i], own)) t = ar.add(t, w[j]);
          }
          if (mi ? !(s == t) : !ar.leq(s, t)) return false;
        }
      }
      return true;
    }
    case AtomKind::INDStar:
    case AtomKind::MDE: {
      auto bag = [&](const std::vector<int>& cols) {
        std::vector<W> out;
        for (std::size_t i = 0; i < n; ++i) {
          bool first = true;
          for (std::size_t j = 0; j < i && first; ++j) first = !same_cols(*rows[j], cols, *rows[i], cols);
          if (!first) continue;
          W s = ar.zero();
          for (std::size_t j = i; j < n; ++j)
            if (same_cols(*rows[j], cols, *rows[i], cols)) s = ar.add(s, w[j]);
          if (!ar.is_zero(s)) out.push_back(s);
        }
        std::sort(out.begin(), out.end(), [&](const W& x, const W& y) { return ar.less(x, y); });
        return out;
      };
      auto bl = bag(a.l), br = bag(a.r);
      if (a.kind == AtomKind::MDE) return bl == br;
      std::size_t j = 0;
      for (const auto& v : bl) {
        while (j < br.size() && ar.less(br[j], v)) ++j;
        if (j == br.size() || !(br[j] == v)) return false;
        ++j;
      }
      return true;
    }
    case AtomKind::CI: {
      for (std::size_t g = 0; g < n; ++g) {
        bool first = true;
        for (std::size_t j = 0; j < g && first; ++j) first = !same_cols(*rows[j], a.c, *rows[g], a.c);
        if (!first) continue;
        std::vector<std::size_t> grp;
        for (std::size_t j = g; j < n; ++j)
          if (same_cols(*rows[j], a.c, *rows[g], a.c)) grp.push_back(j);
        W mx = ar.zero();
        for (auto j : grp) mx = ar.add(mx, w[j]);
        for (auto i : grp)
          for (auto k : grp) {
            W vb = ar.zero(), vc = ar.zero(), vbc = ar.zero();
            for (auto j : grp) {
              bool b = same_cols(*rows[j], a.l, *rows[i], a.l), c = same_cols(*rows[j], a.r, *rows[k], a.r);
              if (b) vb = ar.add(vb, w[j]);
              if (c) vc = ar.add(vc, w[j]);
              if (b && c) vbc = ar.add(vbc, w[j]);
            }
            if (!(ar.mul(vbc, mx) == ar.mul(vb, vc))) return false;
          }
      }
      return true;
    }
  }
  return true;
}

template <class A>
std::optional<KTeam> refute_with(const std::vector<Atom>& sigma, const Atom& tau, const Semiring& K,
                                 const Schema& D, const SearchBounds& b, const std::vector<Value>& pool,
                                 const A& ar) {
  using W = typename A::W;
  const int nv = static_cast<int>(D.size());
  const int m = static_cast<int>(std::max<std::size_t>(b.max_values, 1));
  std::vector<Compiled> cs;
  for (const auto& a : sigma) cs.push_back(compile(a, D));
  Compiled ct = compile(tau, D);

  // All assignments over {0..m-1}^D in lexicographic order.
  std::vector<Tuple> all;
  {
    Tuple t(nv, 0);
    while (true) {
      all.push_back(t);
      int p = nv - 1;
      while (p >= 0 && t[p] == m - 1) t[p--] = 0;
      if (p < 0) break;
      ++t[p];
    }
  }
  auto index_of = [&](const Tuple& t) {
    std::size_t k = 0;
    for (Val v : t) k = k * m + static_cast<std::size_t>(v);
    return k;
  };
  // Value permutations other than the identity, for the orbit check.
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    while (std::next_permutation(p.begin(), p.end())) perms.push_back(p);
  }
  std::vector<W> wpool;
  for (const auto& v : pool) wpool.push_back(A::of(v));

  const std::size_t R = std::min(b.max_rows, all.size());
  std::vector<std::size_t> comb;
  std::vector<const Tuple*> rows;
  std::vector<W> w;
  std::vector<std::size_t> img;
  auto canonical = [&](std::size_t r) {
    for (const auto& p : perms) {
      img.clear();
      for (std::size_t i = 0; i < r; ++i) {
        Tuple t = all[comb[i]];
        for (auto& v : t) v = p[v];
        img.push_back(index_of(t));
      }
      std::sort(img.begin(), img.end());
      if (img < comb) return false;
    }
    return true;
  };
  auto found = [&](std::size_t r, const std::vector<std::size_t>& wi) {
    KTeam X(D, K);
    for (std::size_t i = 0; i < r; ++i) X.add_row(all[comb[i]], pool[wi[i]]);
    if (!satisfies_all(X, sigma) || satisfies(X, tau))
      throw Error("internal", "fast evaluator disagrees with the reference semantics");
    return X;
  };

  for (std::size_t r = 0; r <= R; ++r) {
    if (r > 0 && wpool.empty()) break;
    comb.resize(r);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      if (canonical(r)) {
        rows.assign(r, nullptr);
        for (std::size_t i = 0; i < r; ++i) rows[i] = &all[comb[i]];
        std::vector<std::size_t> wi(r, 0);
        w.assign(r, W{});
        while (true) {
          for (std::size_t i = 0; i < r; ++i) w[i] = wpool[wi[i]];
          if (!small_holds(ct, rows, w, ar)) {
            bool ok = true;
            for (const auto& c : cs)
              if (!small_holds(c, rows, w, ar)) {
                ok = false;
                break;
              }
            if (ok) return found(r, wi);
          }
          int p = static_cast<int>(r) - 1;
          while (p >= 0 && wi[p] + 1 == wpool.size()) wi[p--] = 0;
          if (p < 0) break;
          ++wi[p];
        }
      }
      // Next r-combination of all.size().
      int p = static_cast<int>(r) - 1;
      while (p >= 0 && comb[p] == all.size() - r + p) --p;
      if (p < 0) break;
      ++comb[p];
      for (std::size_t i = p + 1; i < r; ++i) comb[i] = comb[i - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Nonzero pool elements, duplicates removed, in pool order.
inline std::vector<Value> search_pool(const Semiring& K, const SearchBounds& b) {
  std::vector<Value> out;
  for (const auto& v : b.weight_pool.empty() ? K.pool : b.weight_pool) {
    if (v.id() != K.id) throw TypeError("pool value is not an element of " + K.name);
    if (!K.is_zero(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

// First team, in a fixed order, over D with at most b.max_rows assignments of
// values below b.max_values that satisfies sigma and violates tau. Rows of
// weight zero change nothing, so zero is dropped from the pool. Row sets are
// taken up to renaming of values: only the least member of each orbit under
// value permutations is tried.
inline std::optional<KTeam> refute(const std::vector<Atom>& sigma, const Atom& tau, const Semiring& K,
                                   const SearchBounds& b, std::optional<Schema> schema = std::nullopt) {
  std::vector<Atom> all = sigma;
  all.push_back(tau);
  Schema D = schema ? *schema : Schema(vars_of(all));
  for (const auto& a : all) {
    validate(a);
    if (a.kind == AtomKind::IND && !K.flags.totally_zero_min_ordered)
      throw CapabilityError("inclusion atoms need a totally zero-min ordered semiring");
  }
  auto pool = search_pool(K, b);
  if (detail::FastArith::exact_for(pool))
    return detail::refute_with(sigma, tau, K, D, b, pool, detail::FastArith{K.id});
  return detail::refute_with(sigma, tau, K, D, b, pool, detail::ExactArith{&K});
}

// Pseudo-random team: between 1 and b.max_rows distinct rows (none when
// max_rows is 0), values below b.max_values, weights drawn from the pool as
// given, zero included.
inline KTeam random_team(const Semiring& K, const Schema& D, const SearchBounds& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& pool = b.weight_pool.empty() ? K.pool : b.weight_pool;
  KTeam X(D, K);
  if (b.max_rows == 0 || pool.empty()) return X;
  const std::size_t m = std::max<std::size_t>(b.max_values, 1);
  double space = std::pow(static_cast<double>(m), static_cast<double>(D.size()));
  std::size_t cap = space > 1e6 ? b.max_rows : std::min<std::size_t>(b.max_rows, static_cast<std::size_t>(space));
  std::size_t r = std::uniform_int_distribution<std::size_t>(1, cap)(rng);
  std::set<Tuple> seen;
  std::uniform_int_distribution<int> val(0, static_cast<int>(m) - 1);
  std::uniform_int_distribution<std::size_t> wi(0, pool.size() - 1);
  while (seen.size() < r) {
    Tuple t(D.size());
    for (auto& v : t) v = val(rng);
    if (seen.insert(t).second) X.add_row(t, pool[wi(rng)]);
  }
  return X;
}

// ---------------------------------------------------------------------------
// Soundness fuzzing

struct RuleInstance {
  Rule rule;
  int k = 0;  // cycle length, cycle rules only
  Schema schema;
  std::vector<Atom> premises, conclusions;
};

namespace detail {

class InstanceGen {
 public:
  explicit InstanceGen(std::mt19937_64& rng) : rng_(rng) {}

  RuleInstance make(Rule r) {
    RuleInstance I{r, 0, Schema{}, {}, {}};
    using R = Rule;
    auto fd = [](VarTuple l, VarTuple rr) { return Atom::fd(std::move(l), std::move(rr)); };
    switch (r) {
      case R::FD1: {
        auto x = tuple(1, 3);
        I.conclusions = {fd(x, subtuple(x))};
        break;
      }
      case R::FD2: {
        auto x = tuple(1, 3), y = tuple(1, 3), z = tuple(1, 3);
        I.premises = {fd(x, y), fd(y, z)};
        I.conclusions = {fd(x, z)};
        break;
      }
      case R::FD3: {
        auto x = tuple(1, 3), y = tuple(1, 3), z = tuple(1, 2);
        I.premises = {fd(x, y)};
        I.conclusions = {fd(cat(x, z), cat(y, z))};
        break;
      }
      case R::UFD1: {
        auto x = var();
        I.conclusions = {fd({x}, {x})};
        break;
      }
      case R::UFD2: {
        VarTuple x = coin(4) ? VarTuple{} : VarTuple{var()};
        auto y = var(), z = var();
        I.premises = {fd(x, {y}), fd({y}, {z})};
        I.conclusions = {fd(x, {z})};
        break;
      }
      case R::UFD3: {
        auto x = var(), y = var();
        I.premises = {Atom::ca({y})};
        I.conclusions = {fd({x}, {y})};
        break;
      }
      case R::IND1: case R::MI1: case R::UIND1: case R::UMI1: {
        bool u = r == R::UIND1 || r == R::UMI1;
        auto x = u ? VarTuple{var()} : tuple(1, 3);
        I.conclusions = {r == R::IND1 || r == R::UIND1 ? Atom::ind(x, x) : Atom::mi(x, x)};
        break;
      }
      case R::IND2: case R::UIND2: case R::MI3: case R::UMI3: {
        bool u = r == R::UIND2 || r == R::UMI3;
        std::size_t k = u ? 1 : len(1, 3);
        auto x = tuple(k, k), y = tuple(k, k), z = tuple(k, k);
        auto mk = [&](VarTuple a, VarTuple b) {
          return r == R::IND2 || r == R::UIND2 ? Atom::ind(a, b) : Atom::mi(a, b);
        };
        I.premises = {mk(x, y), mk(y, z)};
        I.conclusions = {mk(x, z)};
        break;
      }
      case R::IND3: case R::MI4: {
        std::size_t k = len(1, 3);
        auto x = tuple(k, k), y = tuple(k, k);
        auto p = positions(k);
        auto mk = [&](VarTuple a, VarTuple b) { return r == R::IND3 ? Atom::ind(a, b) : Atom::mi(a, b); };
        I.premises = {mk(x, y)};
        I.conclusions = {mk(pick(x, p), pick(y, p))};
        break;
      }
      case R::MI2: case R::UMI2: case R::MDE2: case R::UMDE2: {
        bool u = r == R::UMI2 || r == R::UMDE2;
        bool mi = r == R::MI2 || r == R::UMI2;
        std::size_t k = u ? 1 : len(1, 3);
        auto x = tuple(k, k), y = mi ? tuple(k, k) : (u ? tuple(1, 1) : tuple(1, 3));
        auto mk = [&](VarTuple a, VarTuple b) { return mi ? Atom::mi(a, b) : Atom::mde(a, b); };
        I.premises = {mk(x, y)};
        I.conclusions = {mk(y, x)};
        break;
      }
      case R::INDS1: case R::UINDS1: case R::MDE1: case R::UMDE1: {
        bool u = r == R::UINDS1 || r == R::UMDE1;
        auto x = u ? VarTuple{var()} : tuple(1, 3);
        I.conclusions = {r == R::INDS1 || r == R::UINDS1 ? Atom::ind_star(x, x) : Atom::mde(x, x)};
        break;
      }
      case R::INDS2: case R::UINDS2: case R::MDE3: case R::UMDE3: {
        bool u = r == R::UINDS2 || r == R::UMDE3;
        auto x = u ? tuple(1, 1) : tuple(1, 3), y = u ? tuple(1, 1) : tuple(1, 3), z = u ? tuple(1, 1) : tuple(1, 3);
        auto mk = [&](VarTuple a, VarTuple b) {
          return r == R::INDS2 || r == R::UINDS2 ? Atom::ind_star(a, b) : Atom::mde(a, b);
        };
        I.premises = {mk(x, y), mk(y, z)};
        I.conclusions = {mk(x, z)};
        break;
      }
      case R::INDS3: case R::MDE4: {
        auto x = tuple(1, 3), y = tuple(1, 3);
        auto mk = [&](VarTuple a, VarTuple b) { return r == R::INDS3 ? Atom::ind_star(a, b) : Atom::mde(a, b); };
        I.premises = {mk(x, y)};
        I.conclusions = {mk(shuffled(x), shuffled(y))};
        break;
      }
      case R::IA1: {
        I.conclusions = {Atom::ia({}, tuple(0, 3))};
        break;
      }
      case R::IA2: {
        auto p = parts({len(1, 2), len(1, 2)});
        I.premises = {Atom::ia(p[0], p[1])};
        I.conclusions = {Atom::ia(p[1], p[0])};
        break;
      }
      case R::IA3: {
        auto p = parts({len(1, 3), len(1, 3)});
        I.premises = {Atom::ia(p[0], p[1])};
        I.conclusions = {Atom::ia(subset(p[0]), subset(p[1]))};
        break;
      }
      case R::IA4: {
        auto p = parts({len(1, 2), len(1, 2), len(1, 2)});
        I.premises = {Atom::ia(p[0], p[1]), Atom::ia(cat(p[0], p[1]), p[2])};
        I.conclusions = {Atom::ia(p[0], cat(p[1], p[2]))};
        break;
      }
      case R::CI1: {
        auto p = parts({len(0, 2), len(0, 2)});
        I.conclusions = {Atom::ci(p[0], {}, p[1])};
        break;
      }
      case R::CI2: {
        auto p = parts({len(0, 2), len(1, 2), len(1, 2)});
        I.premises = {Atom::ci(p[0], p[1], p[2])};
        I.conclusions = {Atom::ci(p[0], p[2], p[1])};
        break;
      }
      case R::CI3: {
        auto p = parts({len(0, 2), len(1, 2), len(1, 2)});
        I.premises = {Atom::ci(p[0], p[1], p[2])};
        I.conclusions = {Atom::ci(p[0], subset(p[1]), subset(p[2]))};
        break;
      }
      case R::CI4: {
        auto p = parts({len(0, 1), len(1, 2), len(0, 2), len(1, 1)});  // x y z w
        I.premises = {Atom::ci(p[0], p[1], cat(p[2], p[3]))};
        I.conclusions = {Atom::ci(cat(p[0], p[3]), p[1], p[2])};
        break;
      }
      case R::CI5: {
        auto p = parts({len(0, 1), len(1, 2), len(1, 2), len(1, 1)});
        I.premises = {Atom::ci(p[0], p[1], p[2]), Atom::ci(cat(p[0], p[2]), p[1], p[3])};
        I.conclusions = {Atom::ci(p[0], p[1], cat(p[2], p[3]))};
        break;
      }
      case R::SCI1: case R::SCI2: case R::SCI3: case R::SCI4: case R::SCI_FD1: case R::SCI_FD2:
        return sci(r);
      case R::MI_MDE: {
        std::size_t k = len(1, 3);
        auto x = tuple(k, k), y = tuple(k, k);
        I.premises = {Atom::mi(x, y)};
        I.conclusions = {Atom::mde(x, y)};
        break;
      }
      case R::UMI_UMDE: {
        auto x = var(), y = var();
        I.premises = {Atom::mi({x}, {y})};
        I.conclusions = {Atom::mde({x}, {y})};
        break;
      }
      case R::CA_MDE1: case R::UCA_UMDE1: {
        bool u = r == R::UCA_UMDE1;
        auto x = u ? tuple(1, 1) : tuple(1, 3), y = u ? tuple(1, 1) : tuple(1, 3);
        I.premises = {Atom::mde(x, y), Atom::ca(y)};
        I.conclusions = {Atom::ca(x)};
        break;
      }
      case R::CA_MDE2: case R::UCA_UMDE2: {
        bool u = r == R::UCA_UMDE2;
        auto x = u ? tuple(1, 1) : tuple(1, 3), y = u ? tuple(1, 1) : tuple(1, 3);
        I.premises = {Atom::ca(x), Atom::ca(y)};
        I.conclusions = {Atom::mde(x, y)};
        break;
      }
      case R::IA_FD1: {
        auto p = parts({len(1, 2), len(1, 2), len(1, 2)});
        I.premises = {Atom::ia(p[0], p[1]), Atom::ca(p[2])};
        I.conclusions = {Atom::ia(p[0], cat(p[1], p[2]))};
        break;
      }
      case R::IA_FD2: {
        auto p = parts({len(1, 2), len(1, 2)});
        I.premises = {Atom::ia(p[0], p[1]), fd(p[0], p[1])};
        I.conclusions = {Atom::ca(p[1])};
        break;
      }
      case R::CYCLE_UIND: case R::CYCLE_UMI: case R::CYCLE_UMDE:
        return cycle(r);
      case R::COUNT:
        break;
    }
    I.schema = schema_of(I);
    return I;
  }

 private:
  std::mt19937_64& rng_;
  static constexpr int kPool = 6;

  static Var name(int i) { return std::string(1, static_cast<char>('a' + i)); }
  bool coin(int one_in) { return std::uniform_int_distribution<int>(0, one_in - 1)(rng_) == 0; }
  std::size_t len(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  Var var() { return name(std::uniform_int_distribution<int>(0, kPool - 1)(rng_)); }
  std::vector<int> order() {
    std::vector<int> p(kPool);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng_);
    return p;
  }
  VarTuple tuple(std::size_t lo, std::size_t hi) {
    auto p = order();
    VarTuple t;
    for (std::size_t i = 0, n = len(lo, hi); i < n; ++i) t.push_back(name(p[i]));
    return t;
  }
  // Pairwise disjoint tuples of the given lengths.
  std::vector<VarTuple> parts(std::vector<std::size_t> lens) {
    auto p = order();
    std::vector<VarTuple> out;
    std::size_t at = 0;
    for (auto n : lens) {
      if (at + n > p.size()) n = p.size() - at;
      VarTuple t;
      for (std::size_t i = 0; i < n; ++i) t.push_back(name(p[at++]));
      out.push_back(t);
    }
    return out;
  }
  static VarTuple cat(const VarTuple& a, const VarTuple& b) {
    VarTuple out = a;
    for (const auto& v : b)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }
  std::vector<std::size_t> positions(std::size_t k) {
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng_);
    p.resize(len(1, k));
    return p;
  }
  static VarTuple pick(const VarTuple& t, const std::vector<std::size_t>& p) {
    VarTuple out;
    for (auto i : p) out.push_back(t[i]);
    return out;
  }
  VarTuple subtuple(const VarTuple& t) { return pick(t, positions(t.size())); }
  VarTuple shuffled(VarTuple t) {
    std::shuffle(t.begin(), t.end(), rng_);
    return t;
  }
  // Possibly empty subset, in random order.
  VarTuple subset(const VarTuple& t) {
    VarTuple out;
    for (const auto& v : t)
      if (coin(2)) out.push_back(v);
    return shuffled(out);
  }

  static Schema schema_of(const RuleInstance& I) {
    std::vector<Atom> all = I.premises;
    all.insert(all.end(), I.conclusions.begin(), I.conclusions.end());
    return Schema(vars_of(all));
  }

  // Saturated independence rules live over a fixed D, here d variables.
  RuleInstance sci(Rule r) {
    RuleInstance I{r, 0, Schema{}, {}, {}};
    auto D = tuple(2, 5);
    Schema S(D);
    auto mvd = [&](const VarTuple& x, const VarTuple& y) { return mvd_notation(x, y, S); };
    auto diff = [](const VarTuple& a, const VarTuple& b) {
      VarTuple out;
      for (const auto& v : a)
        if (std::find(b.begin(), b.end(), v) == b.end()) out.push_back(v);
      return out;
    };
    switch (r) {
      case Rule::SCI1: {
        auto x = subset(D), y = subset(D);
        I.premises = {mvd(x, y)};
        VarTuple z = diff(diff(D, y), x);  // the complement side
        I.conclusions = {mvd(x, cat(z, subset(x)))};
        break;
      }
      case Rule::SCI2: {
        auto x = subset(D);
        I.conclusions = {mvd(x, subset(x))};
        break;
      }
      case Rule::SCI3: {
        auto x = subset(D), y = subset(D), w = subset(D);
        I.premises = {mvd(x, y)};
        I.conclusions = {mvd(cat(x, w), cat(y, subset(w)))};
        break;
      }
      case Rule::SCI4: {
        auto x = subset(D), y = subset(D), z = subset(D);
        I.premises = {mvd(x, y), mvd(y, z)};
        VarTuple w = diff(z, y);
        I.conclusions = {mvd(x, w)};
        break;
      }
      case Rule::SCI_FD1: {
        auto x = subset(D), y = tuple(1, 1);
        if (std::find(D.begin(), D.end(), y[0]) == D.end()) y = {D[0]};
        I.premises = {Atom::fd(x, y)};
        I.conclusions = {mvd(x, y)};
        break;
      }
      case Rule::SCI_FD2: {
        // Coalescence: the left side of the FD avoids the block z \ x.
        Atom m = mvd(subset(D), subset(D));
        while (m.lhs.empty()) m = mvd(subset(D), subset(D));
        VarTuple v = subset(diff(D, m.lhs)), z2 = subset(D);
        VarTuple w;
        for (const auto& u : m.lhs)
          if (std::find(z2.begin(), z2.end(), u) != z2.end()) w.push_back(u);
        if (w.empty()) {
          w = {m.lhs[0]};
          z2.push_back(m.lhs[0]);
        }
        I.premises = {m, Atom::fd(v, z2)};
        I.conclusions = {Atom::fd(m.cond, w)};
        break;
      }
      default:
        break;
    }
    I.schema = S;
    return I;
  }

  RuleInstance cycle(Rule r) {
    RuleInstance I{r, 0, Schema{}, {}, {}};
    static const int ks[] = {1, 3, 5};
    int k = ks[len(0, 2)];
    I.k = k;
    std::vector<Var> x(k + 1);
    if (coin(2)) {
      auto p = order();
      for (int i = 0; i <= k; ++i) x[i] = name(p[i]);
    } else {
      for (auto& v : x) v = var();
    }
    auto S = [&](int i) { return i == k ? 0 : i + 1; };
    for (int i = 0; i <= k; ++i) {
      if (i % 2 == 0 && i <= k - 1) {
        I.premises.push_back(Atom::fd({x[i]}, {x[S(i)]}));
        I.conclusions.push_back(Atom::fd({x[S(i)]}, {x[i]}));
        if (r == Rule::CYCLE_UMDE) I.conclusions.push_back(Atom::mde({x[i]}, {x[S(i)]}));
      } else if (i % 2 == 1) {
        if (r == Rule::CYCLE_UIND) {
          I.premises.push_back(Atom::ind({x[S(i)]}, {x[i]}));
          I.conclusions.push_back(Atom::ind({x[i]}, {x[S(i)]}));
        } else if (r == Rule::CYCLE_UMI) {
          I.premises.push_back(Atom::mi({x[i]}, {x[S(i)]}));
        } else {
          I.premises.push_back(Atom::mde({x[i]}, {x[S(i)]}));
        }
      }
    }
    I.schema = schema_of(I);
    return I;
  }
};

}  // namespace detail

inline RuleInstance random_instance(Rule r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return detail::InstanceGen(rng).make(r);
}

struct Violation {
  std::uint64_t seed;       // random_instance(rule, seed) gives the instance
  std::uint64_t team_seed;  // the team, see fuzz_rule
  std::vector<Atom> premises, conclusions;
  std::string failed, team_tsv;
};

struct RuleStats {
  std::string rule;
  std::size_t trials = 0, hits = 0, starved = 0, samples = 0;
  std::vector<Violation> violations;

  double hit_rate() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
};

struct FuzzReport {
  std::string system, semiring;
  std::vector<std::string> missing;  // preconditions the semiring lacks; nothing is run then
  std::vector<RuleStats> rules;

  std::size_t violations() const {
    std::size_t n = 0;
    for (const auto& r : rules) n += r.violations.size();
    return n;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["system"] = system;
    j["semiring"] = semiring;
    j["missing"] = missing;
    j["violations"] = violations();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rules) {
      nlohmann::ordered_json e;
      e["rule"] = r.rule;
      e["trials"] = r.trials;
      e["premise_hits"] = r.hits;
      e["hit_rate"] = r.hit_rate();
      e["starved"] = r.starved;
      e["samples"] = r.samples;
      auto vs = nlohmann::ordered_json::array();
      for (const auto& v : r.violations) {
        nlohmann::ordered_json o;
        o["seed"] = v.seed;
        o["team_seed"] = v.team_seed;
        auto text = [](const std::vector<Atom>& as) {
          std::vector<std::string> out;
          for (const auto& a : as) out.push_back(print(a));
          return out;
        };
        o["premises"] = text(v.premises);
        o["conclusions"] = text(v.conclusions);
        o["failed"] = v.failed;
        o["team"] = v.team_tsv;
        vs.push_back(o);
      }
      e["violations"] = vs;
      arr.push_back(e);
    }
    j["rules"] = arr;
    return j;
  }
};

inline constexpr std::size_t kRejectionBudget = 200;

// Teams used while fuzzing: up to four rows over two or three values.
inline SearchBounds fuzz_bounds(std::mt19937_64& rng) {
  SearchBounds b;
  b.max_rows = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  b.max_values = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
  return b;
}

inline RuleStats fuzz_rule(Rule r, const Semiring& K, std::size_t trials, std::uint64_t seed) {
  RuleStats st;
  st.rule = rule_name(r);
  std::mt19937_64 master(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(r) + 1)));
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint64_t iseed = master();
    RuleInstance I = random_instance(r, iseed);
    ++st.trials;
    std::mt19937_64 trng(iseed);
    bool hit = false;
    for (std::size_t s = 0; s < kRejectionBudget && !hit; ++s) {
      ++st.samples;
      std::uint64_t tseed = trng();
      std::mt19937_64 brng(tseed);
      KTeam X = random_team(K, I.schema, fuzz_bounds(brng), tseed);
      if (!satisfies_all(X, I.premises)) continue;
      hit = true;
      for (const auto& c : I.conclusions)
        if (!satisfies(X, c)) {
          st.violations.push_back({iseed, tseed, I.premises, I.conclusions, print(c), to_tsv(X)});
          break;
        }
    }
    if (hit) ++st.hits;
    else ++st.starved;
  }
  return st;
}

// Fuzzes every rule of sys over K. Refuses to run rules whose soundness needs
// properties K lacks; the report then lists them.
inline FuzzReport soundness_fuzz(const AxiomSystem& sys, const Semiring& K, std::size_t trials, std::uint64_t seed) {
  FuzzReport rep;
  rep.system = sys.name;
  rep.semiring = K.name;
  rep.missing = sys.missing(K.flags);
  if (!rep.missing.empty()) return rep;
  for (Rule r : sys.rules) rep.rules.push_back(fuzz_rule(r, K, trials, seed));
  return rep;
}

// ---------------------------------------------------------------------------
// Negative control: 2x2 matrices over the naturals. Not commutative, so the
// symmetry rule for independence has to break on some team.

struct Mat2 {
  std::array<long long, 4> a{};
  friend bool operator==(const Mat2& x, const Mat2& y) { return x.a == y.a; }
};

struct MatOps {
  using V = Mat2;
  V zero() const { return {}; }
  V add(const V& x, const V& y) const {
    V r;
    for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
  }
  V mul(const V& x, const V& y) const {
    return {{x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
             x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]}};
  }
  bool eq(const V& x, const V& y) const { return x == y; }
};

// IA2 instances x _||_ y / y _||_ x over random two-column teams with 0/1
// matrix weights.
inline RuleStats noncommutative_ia2_control(std::size_t trials, std::uint64_t seed) {
  RuleStats st;
  st.rule = "IA2 over 2x2 matrices";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  const std::vector<int> none, x{0}, y{1};
  for (std::size_t t = 0; t < trials; ++t) {
    ++st.trials;
    bool hit = false;
    for (std::size_t s = 0; s < kRejectionBudget && !hit; ++s) {
      ++st.samples;
      std::uint64_t tseed = rng();
      std::mt19937_64 g(tseed);
      std::set<Tuple> rows;
      std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(g);
      while (rows.size() < n) rows.insert(Tuple{bit(g), bit(g)});
      std::vector<Tuple> rv(rows.begin(), rows.end());
      std::vector<Mat2> w(rv.size());
      for (auto& m : w)
        for (auto& e : m.a) e = bit(g);
      if (!independence_holds(rv, w, none, x, y, MatOps{})) continue;
      hit = true;
      if (!independence_holds(rv, w, none, y, x, MatOps{})) {
        std::string tsv = "x\ty\t#weight\n";
        for (std::size_t i = 0; i < rv.size(); ++i) {
          const auto& m = w[i].a;
          tsv += std::to_string(rv[i][0]) + "\t" + std::to_string(rv[i][1]) + "\t[" + std::to_string(m[0]) + " " +
                 std::to_string(m[1]) + "; " + std::to_string(m[2]) + " " + std::to_string(m[3]) + "]\n";
        }
        st.violations.push_back({seed, tseed, {Atom::ia({"x"}, {"y"})}, {Atom::ia({"y"}, {"x"})}, "y _||_ x", tsv});
      }
    }
    if (hit) ++st.hits;
    else ++st.starved;
  }
  return st;
}

}  // namespace kdep
