#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "kdep/atoms.hpp"
#include "kdep/axioms.hpp"
#include "kdep/cycles.hpp"
#include "kdep/error.hpp"
#include "kdep/kteam.hpp"

namespace kdep {

struct Step {
  Atom atom;
  std::string rule;             // "hypothesis", a rule name, or e.g. "3-CYCLE-UIND"
  std::vector<std::size_t> premises;  // indices of earlier steps
};

struct Derivation {
  std::vector<Step> steps;

  const Atom& goal() const { return steps.back().atom; }
  std::string to_text() const {
    std::ostringstream ss;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      ss << i + 1 << ". " << print(steps[i].atom) << "    " << steps[i].rule;
      for (std::size_t j = 0; j < steps[i].premises.size(); ++j)
        ss << (j ? ", " : " from ") << steps[i].premises[j] + 1;
      ss << '\n';
    }
    return ss.str();
  }
};

enum class Engine { Auto, Explicit, Symbolic };

namespace detail {

using Mask = std::uint64_t;

inline int popc(Mask m) { return std::popcount(m); }
inline int low_bit(Mask m) { return std::countr_zero(m); }
inline Mask bit(int i) { return Mask(1) << i; }

inline Mask mask_of(const VarTuple& t, const Schema& D) {
  Mask m = 0;
  for (const auto& v : t) m |= bit(D.index(v));
  return m;
}

inline VarTuple vars_of_mask(Mask m, const Schema& D) {
  VarTuple out;
  for (; m; m &= m - 1) out.push_back(D.vars()[low_bit(m)]);
  return out;
}

// Rough count of the atoms a language has over n variables, used to choose
// an engine.
inline double atom_space(const Language& L, int n) {
  double p2 = std::ldexp(1.0, n), s = 0, nn = n;
  switch (L.fd) {
    case Language::UnaryConst: s += nn; break;
    case Language::Const: s += p2 - 1; break;
    case Language::Unary: s += nn * nn + nn; break;
    case Language::Full: s += p2 * (p2 - 1); break;
    default: break;
  }
  auto injections = [&] {
    double t = 0, c = 1, f = 1;
    for (int k = 1; k <= n; ++k) c = c * (n - k + 1) / k, f *= k, t += c * c * f;
    return t;
  };
  for (int lvl : {L.ind, L.mi}) s += lvl == Language::Full ? injections() : lvl ? nn * nn : 0;
  for (int lvl : {L.indstar, L.mde}) s += lvl == Language::Full ? (p2 - 1) * (p2 - 1) : lvl ? nn * nn : 0;
  if (L.ci) s += std::pow(4.0, n);
  else if (L.ia || L.sci) s += std::pow(3.0, n) * ((L.ia && L.sci) ? 2 : 1);
  return s;
}

}  // namespace detail

// Saturation of Σ under a rule system, restricted to atoms over D whose family
// belongs to the system's language. Every atom keeps the first derivation
// found, which is enough to rebuild a proof. Works for |D| <= 10.
class ExplicitClosure {
 public:
  using Mask = detail::Mask;
  static constexpr int kMaxVars = 10;

  ExplicitClosure(const std::vector<Atom>& sigma, AxiomSystem sys, Schema D)
      : sys_(std::move(sys)), D_(std::move(D)), lang_(sys_.language()) {
    n_ = static_cast<int>(D_.size());
    if (n_ > kMaxVars)
      throw CapabilityError("explicit closure supports at most " + std::to_string(kMaxVars) + " variables");
    full_ = n_ == 64 ? ~Mask(0) : detail::bit(n_) - 1;
    for (Rule r : sys_.rules) on_[static_cast<std::size_t>(r)] = true;
    for (const auto& a : sigma) add(encode(a), Rule::COUNT, {}, 0, true);
    seed();
    saturate();
  }

  const Schema& schema() const { return D_; }
  const AxiomSystem& system() const { return sys_; }
  std::size_t size() const { return nodes_.size(); }

  bool contains(const Atom& a) const { return id_.count(encode(a)) > 0; }

  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    out.reserve(nodes_.size());
    for (const auto& nd : nodes_) out.push_back(decode(nd.key));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<Derivation> proof(const Atom& a) const { return proof(std::vector<Atom>{a}); }

  // One derivation ending in all goals, sharing common steps.
  std::optional<Derivation> proof(const std::vector<Atom>& goals) const {
    Derivation d;
    std::unordered_map<int, std::size_t> pos;
    std::vector<std::pair<int, std::size_t>> st;
    for (auto g = goals.rbegin(); g != goals.rend(); ++g) {
      auto it = id_.find(encode(*g));
      if (it == id_.end()) return std::nullopt;
      st.push_back({it->second, 0});
    }
    // Iterative post-order over provenance.
    while (!st.empty()) {
      auto& [v, k] = st.back();
      if (pos.count(v)) {
        st.pop_back();
        continue;
      }
      const auto& nd = nodes_[v];
      if (k < nd.prem.size()) {
        int p = nd.prem[k++];
        if (!pos.count(p)) st.push_back({p, 0});
        continue;
      }
      Step s{decode(nd.key), rule_label(nd), {}};
      for (int p : nd.prem) s.premises.push_back(pos.at(p));
      pos[v] = d.steps.size();
      d.steps.push_back(std::move(s));
      st.pop_back();
    }
    return d;
  }

 private:
  struct Node {
    std::uint64_t key;
    Rule rule;  // COUNT marks a hypothesis
    int k;      // cycle length for cycle rules
    std::vector<int> prem;
  };
  using Key = std::uint64_t;
  enum : int { kFD = 0, kIND = 1, kINDS = 2, kMI = 3, kMDE = 4, kCI = 5 };

  static Key pack2(int kind, Mask a, Mask b) { return Key(kind) << 60 | a | b << 10; }
  static Key pack_ci(Mask c, Mask l, Mask r) { return Key(kCI) << 60 | c | l << 10 | r << 20; }
  static int kind_of(Key k) { return static_cast<int>(k >> 60); }
  static Mask A(Key k) { return k & 0x3FF; }
  static Mask B(Key k) { return (k >> 10) & 0x3FF; }
  static Mask C(Key k) { return (k >> 20) & 0x3FF; }

  // Partial injections: 4 bits per source variable holding target+1.
  static Key inj_payload(Key k) { return k & ((Key(1) << 40) - 1); }
  int inj_at(Key f, int x) const { return static_cast<int>((f >> (4 * x)) & 15) - 1; }
  Mask inj_dom(Key f) const {
    Mask m = 0;
    for (int x = 0; x < n_; ++x)
      if (inj_at(f, x) >= 0) m |= detail::bit(x);
    return m;
  }
  Mask inj_rng(Key f) const {
    Mask m = 0;
    for (int x = 0; x < n_; ++x)
      if (int y = inj_at(f, x); y >= 0) m |= detail::bit(y);
    return m;
  }
  Key inj_set(Key f, int x, int y) const { return (f & ~(Key(15) << (4 * x))) | Key(y + 1) << (4 * x); }
  Key inj_compose(Key f, Key g) const {  // g after f
    Key h = 0;
    for (int x = 0; x < n_; ++x)
      if (int y = inj_at(f, x); y >= 0) h = inj_set(h, x, inj_at(g, y));
    return h;
  }
  Key inj_inverse(Key f) const {
    Key h = 0;
    for (int x = 0; x < n_; ++x)
      if (int y = inj_at(f, x); y >= 0) h = inj_set(h, y, x);
    return h;
  }
  Key inj_identity(Mask m) const {
    Key h = 0;
    for (int x = 0; x < n_; ++x)
      if (m >> x & 1) h = inj_set(h, x, x);
    return h;
  }

  Key encode(const Atom& a) const {
    switch (a.kind) {
      case AtomKind::FD: return pack2(kFD, detail::mask_of(a.lhs, D_), detail::mask_of(a.rhs, D_));
      case AtomKind::INDStar: return pack2(kINDS, detail::mask_of(a.lhs, D_), detail::mask_of(a.rhs, D_));
      case AtomKind::MDE: return pack2(kMDE, detail::mask_of(a.lhs, D_), detail::mask_of(a.rhs, D_));
      case AtomKind::IND:
      case AtomKind::MI: {
        Key f = 0;
        for (std::size_t i = 0; i < a.lhs.size(); ++i) f = inj_set(f, D_.index(a.lhs[i]), D_.index(a.rhs[i]));
        return Key(a.kind == AtomKind::IND ? kIND : kMI) << 60 | f;
      }
      case AtomKind::CI:
        return pack_ci(detail::mask_of(a.cond, D_), detail::mask_of(a.lhs, D_), detail::mask_of(a.rhs, D_));
    }
    return 0;
  }

  Atom decode(Key k) const {
    auto vs = [&](Mask m) { return detail::vars_of_mask(m, D_); };
    switch (kind_of(k)) {
      case kFD: return canonicalize(Atom::fd(vs(A(k)), vs(B(k))));
      case kINDS: return canonicalize(Atom::ind_star(vs(A(k)), vs(B(k))));
      case kMDE: return canonicalize(Atom::mde(vs(A(k)), vs(B(k))));
      case kIND:
      case kMI: {
        VarTuple l, r;
        for (int x = 0; x < n_; ++x)
          if (int y = inj_at(k, x); y >= 0) l.push_back(D_.vars()[x]), r.push_back(D_.vars()[y]);
        return canonicalize(kind_of(k) == kIND ? Atom::ind(l, r) : Atom::mi(l, r));
      }
      default: return canonicalize(Atom::ci(vs(A(k)), vs(B(k)), vs(C(k))));
    }
  }

  std::string rule_label(const Node& nd) const {
    if (nd.rule == Rule::COUNT) return "hypothesis";
    std::string r = rule_name(nd.rule);
    if (nd.rule == Rule::CYCLE_UIND || nd.rule == Rule::CYCLE_UMI || nd.rule == Rule::CYCLE_UMDE)
      return std::to_string(nd.k) + "-" + r;
    return r;
  }

  bool in_language(Key k) const {
    using L = Language;
    switch (kind_of(k)) {
      case kFD: {
        Mask a = A(k), b = B(k);
        switch (lang_.fd) {
          case L::Full: return true;
          case L::Unary: return detail::popc(a) <= 1 && detail::popc(b) == 1;
          case L::Const: return a == 0;
          case L::UnaryConst: return a == 0 && detail::popc(b) == 1;
          default: return false;
        }
      }
      case kIND:
      case kMI: {
        int lvl = kind_of(k) == kIND ? lang_.ind : lang_.mi;
        return lvl == L::Full || (lvl && detail::popc(inj_dom(inj_payload(k))) == 1);
      }
      case kINDS:
      case kMDE: {
        int lvl = kind_of(k) == kINDS ? lang_.indstar : lang_.mde;
        return lvl == L::Full || (lvl && detail::popc(A(k)) == 1 && detail::popc(B(k)) == 1);
      }
      default: {
        if (lang_.ci) return true;
        if (lang_.ia && A(k) == 0) return true;
        return lang_.sci && (A(k) | B(k) | C(k)) == full_;
      }
    }
  }

  bool on(Rule r) const { return on_[static_cast<std::size_t>(r)]; }
  // The general rule if present, else its unary variant when the premises
  // are unary, else COUNT.
  Rule pick(Rule general, Rule unary, bool premises_unary) const {
    if (on(general)) return general;
    if (on(unary) && premises_unary) return unary;
    return Rule::COUNT;
  }

  void add(Key key, Rule r, std::initializer_list<int> prem, int k = 0, bool hyp = false) {
    add(key, r, std::vector<int>(prem), k, hyp);
  }
  void add(Key key, Rule r, std::vector<int> prem, int k = 0, bool hyp = false) {
    if (!hyp && !in_language(key)) return;
    auto [it, fresh] = id_.emplace(key, static_cast<int>(nodes_.size()));
    if (!fresh) return;
    nodes_.push_back({key, hyp ? Rule::COUNT : r, k, std::move(prem)});
    agenda_.push_back(it->second);
  }

  Key fd(Mask a, Mask b) const { return pack2(kFD, a, b); }
  Key mde(Mask a, Mask b) const { return pack2(kMDE, a, b); }
  Key ci(Mask c, Mask l, Mask r) const { return pack_ci(c, l, r); }
  bool has(Key k) const { return id_.count(k) > 0; }
  int idof(Key k) const { return id_.at(k); }

  template <class F>
  static void submasks(Mask m, F&& f) {
    for (Mask s = m;; s = (s - 1) & m) {
      f(s);
      if (s == 0) break;
    }
  }

  void seed() {
    for (Mask x = 1; x <= full_; ++x) {
      bool single = detail::popc(x) == 1;
      if (on(Rule::FD1)) submasks(x, [&](Mask s) { if (s) add(fd(x, s), Rule::FD1, {}); });
      if (on(Rule::UFD1) && single) add(fd(x, x), Rule::UFD1, {});
      for (auto [g, u, kind] : std::initializer_list<std::tuple<Rule, Rule, int>>{
               {Rule::IND1, Rule::UIND1, kIND}, {Rule::MI1, Rule::UMI1, kMI}})
        if (on(g) || (on(u) && single)) add(Key(kind) << 60 | inj_identity(x), on(g) ? g : u, {});
      if (on(Rule::INDS1) || (on(Rule::UINDS1) && single))
        add(pack2(kINDS, x, x), on(Rule::INDS1) ? Rule::INDS1 : Rule::UINDS1, {});
      if (on(Rule::MDE1) || (on(Rule::UMDE1) && single))
        add(mde(x, x), on(Rule::MDE1) ? Rule::MDE1 : Rule::UMDE1, {});
    }
    for (Mask x = 0; x <= full_; ++x) {
      if (on(Rule::IA1)) add(ci(0, 0, x), Rule::IA1, {});
      if (on(Rule::SCI2)) add(ci(x, 0, full_ & ~x), Rule::SCI2, {});
      if (on(Rule::CI1)) submasks(full_ & ~x, [&](Mask y) { add(ci(x, 0, y), Rule::CI1, {}); });
    }
  }

  void saturate() {
    for (;;) {
      while (!agenda_.empty()) {
        int i = agenda_.front();
        agenda_.pop_front();
        fire(i);
      }
      std::size_t before = nodes_.size();
      cycles();
      if (nodes_.size() == before) break;
    }
  }

  void cycles() {
    struct Fl {
      Rule r;
      CycleFlavor f;
      int kind;
    };
    for (const Fl& fl : {Fl{Rule::CYCLE_UIND, CycleFlavor::UIND, kIND}, Fl{Rule::CYCLE_UMI, CycleFlavor::UMI, kMI},
                         Fl{Rule::CYCLE_UMDE, CycleFlavor::UMDE, kMDE}}) {
      if (!on(fl.r)) continue;
      std::vector<std::pair<int, int>> fds, deps;
      std::vector<int> fd_ids, dep_ids;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Key k = nodes_[i].key;
        int kind = kind_of(k);
        if (kind == kFD && detail::popc(A(k)) == 1 && detail::popc(B(k)) == 1) {
          fds.emplace_back(detail::low_bit(A(k)), detail::low_bit(B(k)));
          fd_ids.push_back(static_cast<int>(i));
        } else if (kind == fl.kind) {
          if (kind == kMDE) {
            if (detail::popc(A(k)) != 1 || detail::popc(B(k)) != 1) continue;
            deps.emplace_back(detail::low_bit(A(k)), detail::low_bit(B(k)));
          } else {
            Mask d = inj_dom(inj_payload(k));
            if (detail::popc(d) != 1) continue;
            int x = detail::low_bit(d);
            deps.emplace_back(x, inj_at(k, x));
          }
          dep_ids.push_back(static_cast<int>(i));
        }
      }
      for (const auto& c : detail::cycle_conclusions(n_, fds, deps, fl.f)) {
        std::vector<int> prem;
        for (int p : c.fd_premises) prem.push_back(fd_ids[p]);
        for (int p : c.dep_premises) prem.push_back(dep_ids[p]);
        Key key;
        if (c.kind == AtomKind::FD) key = fd(detail::bit(c.a), detail::bit(c.b));
        else if (c.kind == AtomKind::MDE) key = mde(detail::bit(c.a), detail::bit(c.b));
        else key = Key(kIND) << 60 | inj_set(0, c.a, c.b);
        add(key, fl.r, std::move(prem), c.k);
      }
    }
  }

  struct Index {
    std::unordered_map<Key, std::vector<int>> m;
    void put(Key k, int i) { m[k].push_back(i); }
    const std::vector<int>& get(Key k) const {
      static const std::vector<int> none;
      auto it = m.find(k);
      return it == m.end() ? none : it->second;
    }
  };

  void enroll(int i) {
    Key k = nodes_[i].key;
    switch (kind_of(k)) {
      case kFD:
        fd_lhs_.put(A(k), i), fd_rhs_.put(B(k), i), fds_.push_back(i);
        if (A(k) == 0) consts_.push_back(i);
        break;
      case kIND: ind_dom_.put(inj_dom(inj_payload(k)), i), ind_rng_.put(inj_rng(inj_payload(k)), i); break;
      case kMI: mi_dom_.put(inj_dom(inj_payload(k)), i), mi_rng_.put(inj_rng(inj_payload(k)), i); break;
      case kINDS: is_lhs_.put(A(k), i), is_rhs_.put(B(k), i); break;
      case kMDE: mde_lhs_.put(A(k), i), mde_rhs_.put(B(k), i); break;
      default:
        ci_cl_.put(A(k) | B(k) << 10, i);
        if (A(k) == 0) ia_left_.put(B(k), i), ias_.push_back(i);
        if ((A(k) | B(k) | C(k)) == full_) sci_cond_.put(A(k), i), scis_.push_back(i);
        break;
    }
  }

  Key key_of(int i) const { return nodes_[i].key; }
  bool unary_fd(Key k) const { return detail::popc(A(k)) <= 1 && detail::popc(B(k)) == 1; }

  void fire(int i) {
    enroll(i);
    const Key k = key_of(i);
    switch (kind_of(k)) {
      case kFD: fire_fd(i, A(k), B(k)); break;
      case kIND:
      case kMI: fire_inj(i, k); break;
      case kINDS:
      case kMDE: fire_set(i, k); break;
      default: fire_ci(i, A(k), B(k), C(k)); break;
    }
  }

  void fire_fd(int i, Mask a, Mask b) {
    const bool un = unary_fd(key_of(i));
    if (Rule r = pick(Rule::FD2, Rule::UFD2, un); r != Rule::COUNT) {
      for (int j : fd_lhs_.get(b)) {
        Key kj = key_of(j);
        if (r == Rule::UFD2 && !unary_fd(kj)) continue;
        add(fd(a, B(kj)), r, {i, j});
      }
      if (a)
        for (int j : fd_rhs_.get(a)) {
          Key kj = key_of(j);
          if (r == Rule::UFD2 && !unary_fd(kj)) continue;
          add(fd(A(kj), b), r, {j, i});
        }
    }
    if (on(Rule::FD3))
      for (int v = 0; v < n_; ++v) add(fd(a | detail::bit(v), b | detail::bit(v)), Rule::FD3, {i});
    if (on(Rule::UFD3) && a == 0 && detail::popc(b) == 1)
      for (int v = 0; v < n_; ++v) add(fd(detail::bit(v), b), Rule::UFD3, {i});
    if (on(Rule::SCI_FD1)) add(ci(a, b & ~a, full_ & ~(a | b)), Rule::SCI_FD1, {i});
    if (on(Rule::SCI_FD2))
      for (int j : scis_) {
        Key s = key_of(j);
        Mask L = B(s);
        if ((a & L) == 0 && (L & b)) add(fd(A(s), L & b), Rule::SCI_FD2, {j, i});
      }
    if (a == 0) {
      if (on(Rule::IA_FD1))
        for (int j : ias_) {
          Key s = key_of(j);
          if ((b & B(s)) == 0) add(ci(0, B(s), C(s) | b), Rule::IA_FD1, {j, i});
        }
      if (Rule r = pick(Rule::CA_MDE1, Rule::UCA_UMDE1, detail::popc(b) == 1); r != Rule::COUNT)
        for (int j : mde_rhs_.get(b)) {
          Key m = key_of(j);
          if (r == Rule::UCA_UMDE1 && detail::popc(A(m)) != 1) continue;
          add(fd(0, A(m)), r, {j, i});
        }
      if (Rule r = pick(Rule::CA_MDE2, Rule::UCA_UMDE2, detail::popc(b) == 1); r != Rule::COUNT)
        for (int j : consts_) {
          Mask c = B(key_of(j));
          if (r == Rule::UCA_UMDE2 && detail::popc(c) != 1) continue;
          add(mde(b, c), r, {i, j});
          add(mde(c, b), r, {j, i});
        }
    } else if (on(Rule::IA_FD2) && (a & b) == 0 && has(ci(0, a, b))) {
      add(fd(0, b), Rule::IA_FD2, {idof(ci(0, a, b)), i});
    }
  }

  void fire_inj(int i, Key k) {
    const bool is_ind = kind_of(k) == kIND;
    const Key f = inj_payload(k), tag = k & ~inj_payload(k);
    const Mask dom = inj_dom(f), rng = inj_rng(f);
    const bool un = detail::popc(dom) == 1;
    Index& by_dom = is_ind ? ind_dom_ : mi_dom_;
    Index& by_rng = is_ind ? ind_rng_ : mi_rng_;
    Rule trans = is_ind ? pick(Rule::IND2, Rule::UIND2, un) : pick(Rule::MI3, Rule::UMI3, un);
    if (trans != Rule::COUNT) {
      for (int j : by_dom.get(rng)) add(tag | inj_compose(f, inj_payload(key_of(j))), trans, {i, j});
      for (int j : by_rng.get(dom)) add(tag | inj_compose(inj_payload(key_of(j)), f), trans, {j, i});
    }
    Rule proj = is_ind ? Rule::IND3 : Rule::MI4;
    if (on(proj) && !un)
      for (Mask m = dom; m; m &= m - 1) add(tag | inj_set(f, detail::low_bit(m), -1), proj, {i});
    if (!is_ind) {
      if (Rule r = pick(Rule::MI2, Rule::UMI2, un); r != Rule::COUNT) add(tag | inj_inverse(f), r, {i});
      if (Rule r = pick(Rule::MI_MDE, Rule::UMI_UMDE, un); r != Rule::COUNT) add(mde(dom, rng), r, {i});
    }
  }

  void fire_set(int i, Key k) {
    const bool is_mde = kind_of(k) == kMDE;
    const Mask a = A(k), b = B(k);
    const bool un = detail::popc(a) == 1 && detail::popc(b) == 1;
    const int kind = kind_of(k);
    Index& by_l = is_mde ? mde_lhs_ : is_lhs_;
    Index& by_r = is_mde ? mde_rhs_ : is_rhs_;
    Rule trans = is_mde ? pick(Rule::MDE3, Rule::UMDE3, un) : pick(Rule::INDS2, Rule::UINDS2, un);
    if (trans != Rule::COUNT) {
      for (int j : by_l.get(b)) add(pack2(kind, a, B(key_of(j))), trans, {i, j});
      for (int j : by_r.get(a)) add(pack2(kind, A(key_of(j)), b), trans, {j, i});
    }
    if (!is_mde) return;
    if (Rule r = pick(Rule::MDE2, Rule::UMDE2, un); r != Rule::COUNT) add(mde(b, a), r, {i});
    if (Rule r = pick(Rule::CA_MDE1, Rule::UCA_UMDE1, un); r != Rule::COUNT && has(fd(0, b)))
      add(fd(0, a), r, {i, idof(fd(0, b))});
  }

  void fire_ci(int i, Mask c, Mask l, Mask r) {
    if (on(Rule::CI2)) add(ci(c, r, l), Rule::CI2, {i});
    if (on(Rule::CI3)) {
      for (Mask m = l; m; m &= m - 1) add(ci(c, l & ~detail::bit(detail::low_bit(m)), r), Rule::CI3, {i});
      for (Mask m = r; m; m &= m - 1) add(ci(c, l, r & ~detail::bit(detail::low_bit(m))), Rule::CI3, {i});
    }
    if (on(Rule::CI4))
      for (Mask m = r; m; m &= m - 1) {
        Mask w = detail::bit(detail::low_bit(m));
        add(ci(c | w, l, r & ~w), Rule::CI4, {i});
      }
    if (on(Rule::CI5)) {
      for (int j : ci_cl_.get((c | r) | l << 10)) add(ci(c, l, r | C(key_of(j))), Rule::CI5, {i, j});
      submasks(c, [&](Mask z) {
        Key first = ci(c & ~z, l, z);
        if (has(first)) add(ci(c & ~z, l, z | r), Rule::CI5, {idof(first), i});
      });
    }
    if (c == 0) {
      if (on(Rule::IA2)) add(ci(0, r, l), Rule::IA2, {i});
      if (on(Rule::IA3)) {
        for (Mask m = l; m; m &= m - 1) add(ci(0, l & ~detail::bit(detail::low_bit(m)), r), Rule::IA3, {i});
        for (Mask m = r; m; m &= m - 1) add(ci(0, l, r & ~detail::bit(detail::low_bit(m))), Rule::IA3, {i});
      }
      if (on(Rule::IA4)) {
        for (int j : ia_left_.get(l | r)) add(ci(0, l, r | C(key_of(j))), Rule::IA4, {i, j});
        submasks(l, [&](Mask y) {
          Key first = ci(0, l & ~y, y);
          if (has(first)) add(ci(0, l & ~y, y | r), Rule::IA4, {idof(first), i});
        });
      }
      if (on(Rule::IA_FD1))
        for (int j : consts_) {
          Mask y = B(key_of(j));
          if ((y & l) == 0) add(ci(0, l, r | y), Rule::IA_FD1, {i, j});
        }
      if (on(Rule::IA_FD2) && l && has(fd(l, r))) add(fd(0, r), Rule::IA_FD2, {i, idof(fd(l, r))});
    }
    if ((c | l | r) != full_) return;
    if (on(Rule::SCI1)) add(ci(c, r, l), Rule::SCI1, {i});
    if (on(Rule::SCI3))
      for (int w = 0; w < n_; ++w)
        if (!(c >> w & 1)) add(ci(c | detail::bit(w), l & ~detail::bit(w), r & ~detail::bit(w)), Rule::SCI3, {i});
    if (on(Rule::SCI4)) {
      // x ->> y with y = l plus part of x, then y ->> z concludes x ->> z \ y.
      auto conclude = [&](Mask x, Mask l2) { return ci(x, l2 & ~x, full_ & ~(x | l2)); };
      submasks(c, [&](Mask s) {
        for (int j : sci_cond_.get(l | s)) add(conclude(c, B(key_of(j))), Rule::SCI4, {i, j});
      });
      for (int j : scis_) {
        Key f = key_of(j);
        Mask x = A(f), lx = B(f);
        if ((lx & ~c) == 0 && (c & ~(x | lx)) == 0) add(conclude(x, l), Rule::SCI4, {j, i});
      }
    }
    if (on(Rule::SCI_FD2))
      for (int j : fds_) {
        Key f = key_of(j);
        if ((A(f) & l) == 0 && (l & B(f))) add(fd(c, l & B(f)), Rule::SCI_FD2, {i, j});
      }
  }

  AxiomSystem sys_;
  Schema D_;
  Language lang_;
  int n_ = 0;
  Mask full_ = 0;
  bool on_[kRuleCount] = {};
  std::vector<Node> nodes_;
  std::unordered_map<Key, int> id_;
  std::deque<int> agenda_;
  Index fd_lhs_, fd_rhs_, ind_dom_, ind_rng_, mi_dom_, mi_rng_, is_lhs_, is_rhs_, mde_lhs_, mde_rhs_;
  Index ci_cl_, ia_left_, sci_cond_;
  std::vector<int> fds_, consts_, ias_, scis_;
};

// Implicit closure for FD/SCI/unary-dependency systems over up to 64
// variables. FDs and saturated independences are decided through the
// dependency basis; unary INDs, MIs and MDEs are kept as relations; cycle
// rules are run to a fixpoint on top. No proofs.
class SymbolicClosure {
 public:
  using Mask = detail::Mask;

  static bool supports(const AxiomSystem& sys) {
    static const std::set<std::string> ok = {"FD", "UFD", "SCI", "SCI+FD", "FD+UIND+SCI", "FD+UMI+SCI",
                                             "FD+UMI", "FD+UMI+UMDE", "UIND", "UMI", "UMDE"};
    return ok.count(sys.name) > 0;
  }

  SymbolicClosure(const std::vector<Atom>& sigma, AxiomSystem sys, Schema D)
      : sys_(std::move(sys)), D_(std::move(D)), lang_(sys_.language()) {
    if (!supports(sys_)) throw CapabilityError("no symbolic engine for " + sys_.name);
    n_ = static_cast<int>(D_.size());
    if (n_ > 64) throw CapabilityError("symbolic closure supports at most 64 variables");
    full_ = n_ == 64 ? ~Mask(0) : detail::bit(n_) - 1;
    ind_.assign(n_, 0), mi_.assign(n_, 0), mde_.assign(n_, 0);
    for (int v = 0; v < n_; ++v) ind_[v] = mi_[v] = mde_[v] = detail::bit(v);
    for (const auto& a0 : sigma) {
      Atom a = canonicalize(a0);
      hyps_.insert(a);
      Mask l = detail::mask_of(a.lhs, D_), r = detail::mask_of(a.rhs, D_);
      switch (a.kind) {
        case AtomKind::FD: fds_.push_back({l, r}); break;
        case AtomKind::CI:
          if (is_saturated(a, D_)) mvds_.push_back({detail::mask_of(a.cond, D_), l});
          break;
        case AtomKind::IND:
        case AtomKind::MI:
        case AtomKind::MDE: {
          if (a.lhs.size() != 1 || a.rhs.size() != 1) break;
          int x = D_.index(a.lhs[0]), y = D_.index(a.rhs[0]);
          auto& rel = a.kind == AtomKind::IND ? ind_ : a.kind == AtomKind::MI ? mi_ : mde_;
          rel[x] |= detail::bit(y);
          break;
        }
        default: break;
      }
    }
    saturate();
  }

  const Schema& schema() const { return D_; }
  const AxiomSystem& system() const { return sys_; }

  bool contains(const Atom& a0) const {
    Atom a = canonicalize(a0);
    for (const auto& v : a.vars()) D_.index(v);
    if (hyps_.count(a)) return true;
    Mask l = detail::mask_of(a.lhs, D_), r = detail::mask_of(a.rhs, D_);
    using L = Language;
    auto unary_pair = [&](int& x, int& y) {
      if (a.lhs.size() != 1 || a.rhs.size() != 1) return false;
      x = D_.index(a.lhs[0]), y = D_.index(a.rhs[0]);
      return true;
    };
    int x, y;
    switch (a.kind) {
      case AtomKind::FD: {
        bool ok = lang_.fd == L::Full || (lang_.fd == L::Unary && a.unary()) ||
                  (lang_.fd == L::Const && l == 0) || (lang_.fd == L::UnaryConst && l == 0 && a.rhs.size() == 1);
        return ok && (r & ~plus(l)) == 0;
      }
      case AtomKind::CI: {
        if (!lang_.sci || !is_saturated(a, D_)) return false;
        for (Mask blk : basis(detail::mask_of(a.cond, D_)))
          if ((blk & l) && (blk & ~l)) return false;
        return true;
      }
      case AtomKind::IND: return lang_.ind && unary_pair(x, y) && (ind_[x] >> y & 1);
      case AtomKind::MI: return lang_.mi && unary_pair(x, y) && (mi_[x] >> y & 1);
      case AtomKind::MDE: return lang_.mde && unary_pair(x, y) && (mde_[x] >> y & 1);
      default: return false;
    }
  }

  // The dependency basis of X: blocks partitioning D \ X.
  const std::vector<Mask>& basis(Mask X) const {
    auto it = dep_cache_.find(X);
    if (it != dep_cache_.end()) return it->second;
    std::vector<Mask> blocks;
    if (full_ & ~X) blocks.push_back(full_ & ~X);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [V, W] : split_) {
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
          Mask Y = blocks[bi];
          if (Y & V) continue;
          Mask in = Y & W;
          if (!in || in == Y) continue;
          blocks[bi] = in;
          blocks.push_back(Y & ~W);
          changed = true;
        }
      }
    }
    return dep_cache_.emplace(X, std::move(blocks)).first->second;
  }

  // Attribute closure of X under the FDs, taking independences into account.
  Mask plus(Mask X) const {
    Mask out = X;
    for (Mask blk : basis(X))
      if (detail::popc(blk) == 1 && (blk & rhs_nontrivial_)) out |= blk;
    return out;
  }

 private:
  void rebuild_split() {
    split_ = mvds_;
    rhs_nontrivial_ = 0;
    for (const auto& [V, W] : fds_)
      for (Mask m = W & ~V; m; m &= m - 1) {
        split_.push_back({V, detail::bit(detail::low_bit(m))});
        rhs_nontrivial_ |= detail::bit(detail::low_bit(m));
      }
    dep_cache_.clear();
  }

  static void transitive(std::vector<Mask>& rel) {
    // Warshall over bit rows.
    const int n = static_cast<int>(rel.size());
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        if (rel[i] >> k & 1) rel[i] |= rel[k];
  }
  static void symmetric(std::vector<Mask>& rel) {
    const int n = static_cast<int>(rel.size());
    for (int i = 0; i < n; ++i)
      for (Mask m = rel[i]; m; m &= m - 1) rel[detail::low_bit(m)] |= detail::bit(i);
  }

  bool on(Rule r) const { return sys_.has(r); }

  void saturate() {
    for (;;) {
      rebuild_split();
      transitive(ind_);
      symmetric(mi_), transitive(mi_);
      if (on(Rule::UMI_UMDE))
        for (int v = 0; v < n_; ++v) mde_[v] |= mi_[v];
      symmetric(mde_), transitive(mde_);
      bool changed = false;
      struct Fl {
        Rule r;
        CycleFlavor f;
        const std::vector<Mask>* rel;
      };
      for (const Fl& fl : {Fl{Rule::CYCLE_UIND, CycleFlavor::UIND, &ind_}, Fl{Rule::CYCLE_UMI, CycleFlavor::UMI, &mi_},
                           Fl{Rule::CYCLE_UMDE, CycleFlavor::UMDE, &mde_}}) {
        if (!on(fl.r)) continue;
        std::vector<std::pair<int, int>> fdp, dep;
        for (int u = 0; u < n_; ++u) {
          for (Mask m = plus(detail::bit(u)); m; m &= m - 1) fdp.emplace_back(u, detail::low_bit(m));
          for (Mask m = (*fl.rel)[u]; m; m &= m - 1) dep.emplace_back(u, detail::low_bit(m));
        }
        for (const auto& c : detail::cycle_conclusions(n_, fdp, dep, fl.f, false)) {
          if (c.kind == AtomKind::FD) {
            if (!(plus(detail::bit(c.a)) >> c.b & 1)) {
              fds_.push_back({detail::bit(c.a), detail::bit(c.b)});
              changed = true;
            }
          } else {
            auto& rel = c.kind == AtomKind::IND ? ind_ : mde_;
            if (!(rel[c.a] >> c.b & 1)) rel[c.a] |= detail::bit(c.b), changed = true;
          }
        }
        if (changed) break;
      }
      if (!changed) break;
    }
  }

  AxiomSystem sys_;
  Schema D_;
  Language lang_;
  int n_ = 0;
  Mask full_ = 0;
  std::set<Atom> hyps_;
  std::vector<std::pair<Mask, Mask>> fds_, mvds_, split_;
  Mask rhs_nontrivial_ = 0;
  std::vector<Mask> ind_, mi_, mde_;
  mutable std::unordered_map<Mask, std::vector<Mask>> dep_cache_;
};

// Closure of Σ under a system, with the engine picked by size unless forced.
class Closure {
 public:
  Closure(std::shared_ptr<const ExplicitClosure> e, std::shared_ptr<const SymbolicClosure> s)
      : e_(std::move(e)), s_(std::move(s)) {}

  bool is_explicit() const { return e_ != nullptr; }
  bool contains(const Atom& a) const { return e_ ? e_->contains(a) : s_->contains(a); }
  const Schema& schema() const { return e_ ? e_->schema() : s_->schema(); }
  const AxiomSystem& system() const { return e_ ? e_->system() : s_->system(); }
  std::vector<Atom> atoms() const {
    if (!e_) throw CapabilityError("the symbolic engine keeps its closure implicit; query with contains()");
    return e_->atoms();
  }
  std::optional<Derivation> proof(const Atom& a) const { return e_ ? e_->proof(a) : std::nullopt; }
  std::optional<Derivation> proof(const std::vector<Atom>& goals) const {
    return e_ ? e_->proof(goals) : std::nullopt;
  }
  const ExplicitClosure* explicit_engine() const { return e_.get(); }
  const SymbolicClosure* symbolic_engine() const { return s_.get(); }

 private:
  std::shared_ptr<const ExplicitClosure> e_;
  std::shared_ptr<const SymbolicClosure> s_;
};

inline Engine choose_engine(const AxiomSystem& sys, const Schema& D) {
  const int n = static_cast<int>(D.size());
  const double space = detail::atom_space(sys.language(), n);
  const bool sym = SymbolicClosure::supports(sys) && n <= 64;
  if (sym && (space > 6000 || n > ExplicitClosure::kMaxVars)) return Engine::Symbolic;
  if (n <= ExplicitClosure::kMaxVars && space <= 400000) return Engine::Explicit;
  if (sym) return Engine::Symbolic;
  throw CapabilityError("closure of " + sys.name + " over " + std::to_string(n) + " variables is too large (about " +
                        std::to_string(static_cast<long long>(space)) + " atoms)");
}

inline Closure closure(const std::vector<Atom>& sigma, const AxiomSystem& sys, const Schema& D,
                       Engine engine = Engine::Auto) {
  for (const auto& a : sigma)
    for (const auto& v : a.vars()) D.index(v);
  if (engine == Engine::Auto) engine = choose_engine(sys, D);
  if (engine == Engine::Explicit) return Closure(std::make_shared<ExplicitClosure>(sigma, sys, D), nullptr);
  return Closure(nullptr, std::make_shared<SymbolicClosure>(sigma, sys, D));
}

}  // namespace kdep
