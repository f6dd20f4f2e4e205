#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "kdep/error.hpp"
#include "kdep/kteam.hpp"

namespace kdep {

enum class AtomKind { FD, IND, INDStar, MI, MDE, CI };

inline const char* kind_name(AtomKind k) {
  switch (k) {
    case AtomKind::FD: return "FD";
    case AtomKind::IND: return "IND";
    case AtomKind::INDStar: return "INDStar";
    case AtomKind::MI: return "MI";
    case AtomKind::MDE: return "MDE";
    case AtomKind::CI: return "CI";
  }
  return "?";
}

// FD(lhs, rhs) is =(lhs, rhs) and a constancy atom when lhs is empty.
// IND, INDStar, MI and MDE read lhs <= rhs, lhs <* rhs, lhs == rhs, lhs =* rhs.
// CI is lhs _||_ rhs | cond; an independence atom when cond is empty.
struct Atom {
  AtomKind kind = AtomKind::FD;
  VarTuple lhs, rhs, cond;

  static Atom make(AtomKind k, VarTuple l, VarTuple r, VarTuple c = {});
  static Atom fd(VarTuple l, VarTuple r) { return make(AtomKind::FD, std::move(l), std::move(r)); }
  static Atom ca(VarTuple r) { return make(AtomKind::FD, {}, std::move(r)); }
  static Atom ind(VarTuple l, VarTuple r) { return make(AtomKind::IND, std::move(l), std::move(r)); }
  static Atom ind_star(VarTuple l, VarTuple r) { return make(AtomKind::INDStar, std::move(l), std::move(r)); }
  static Atom mi(VarTuple l, VarTuple r) { return make(AtomKind::MI, std::move(l), std::move(r)); }
  static Atom mde(VarTuple l, VarTuple r) { return make(AtomKind::MDE, std::move(l), std::move(r)); }
  static Atom ci(VarTuple c, VarTuple l, VarTuple r) {
    return make(AtomKind::CI, std::move(l), std::move(r), std::move(c));
  }
  static Atom ia(VarTuple l, VarTuple r) { return ci({}, std::move(l), std::move(r)); }

  bool is_ca() const { return kind == AtomKind::FD && lhs.empty(); }
  bool is_ia() const { return kind == AtomKind::CI && cond.empty(); }
  bool unary() const {
    if (kind == AtomKind::CI) return false;
    if (kind == AtomKind::FD) return lhs.size() <= 1 && rhs.size() == 1;
    return lhs.size() == 1 && rhs.size() == 1;
  }

  // Variables in order of first appearance.
  VarTuple vars() const {
    VarTuple out;
    for (const auto* t : {&cond, &lhs, &rhs})
      for (const auto& v : *t)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  auto key() const { return std::tie(kind, lhs, rhs, cond); }
  bool operator==(const Atom& o) const { return key() == o.key(); }
  bool operator!=(const Atom& o) const { return !(*this == o); }
  bool operator<(const Atom& o) const { return key() < o.key(); }
};

namespace detail {
inline bool repetition_free(const VarTuple& t) {
  std::set<Var> s(t.begin(), t.end());
  return s.size() == t.size();
}
inline bool disjoint(const VarTuple& a, const VarTuple& b) {
  for (const auto& v : a)
    if (std::find(b.begin(), b.end(), v) != b.end()) return false;
  return true;
}
inline VarTuple sorted_set(VarTuple t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}
}  // namespace detail

inline void validate(const Atom& a) {
  using detail::repetition_free;
  switch (a.kind) {
    case AtomKind::FD:
      if (a.rhs.empty()) throw InvariantError("nonempty-rhs", "dependency needs a nonempty right side");
      break;
    case AtomKind::IND:
    case AtomKind::MI:
      if (a.lhs.size() != a.rhs.size())
        throw ArityError("sides of " + std::string(kind_name(a.kind)) + " differ in length");
      [[fallthrough]];
    case AtomKind::INDStar:
    case AtomKind::MDE:
      if (a.lhs.empty() || a.rhs.empty()) throw InvariantError("nonempty-sides", "both sides must be nonempty");
      if (!repetition_free(a.lhs) || !repetition_free(a.rhs))
        throw InvariantError("repetition-free", "sides must be repetition-free");
      break;
    case AtomKind::CI:
      if (!repetition_free(a.cond) || !repetition_free(a.lhs) || !repetition_free(a.rhs))
        throw InvariantError("repetition-free", "independence parts must be repetition-free");
      if (!detail::disjoint(a.cond, a.lhs) || !detail::disjoint(a.cond, a.rhs) || !detail::disjoint(a.lhs, a.rhs))
        throw InvariantError("disjoint", "independence parts must be pairwise disjoint");
      break;
  }
}

inline Atom Atom::make(AtomKind k, VarTuple l, VarTuple r, VarTuple c) {
  Atom a;
  a.kind = k;
  a.lhs = std::move(l);
  a.rhs = std::move(r);
  a.cond = std::move(c);
  validate(a);
  return a;
}

inline Atom canonicalize(const Atom& a) {
  Atom out = a;
  switch (a.kind) {
    case AtomKind::FD:
      out.lhs = detail::sorted_set(a.lhs);
      out.rhs = detail::sorted_set(a.rhs);
      break;
    case AtomKind::IND:
    case AtomKind::MI: {
      std::vector<std::pair<Var, Var>> pairs;
      for (std::size_t i = 0; i < a.lhs.size(); ++i) pairs.emplace_back(a.lhs[i], a.rhs[i]);
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      out.lhs.clear();
      out.rhs.clear();
      for (auto& [x, y] : pairs) out.lhs.push_back(x), out.rhs.push_back(y);
      break;
    }
    case AtomKind::INDStar:
    case AtomKind::MDE:
      out.lhs = detail::sorted_set(a.lhs);
      out.rhs = detail::sorted_set(a.rhs);
      break;
    case AtomKind::CI:
      out.cond = detail::sorted_set(a.cond);
      out.lhs = detail::sorted_set(a.lhs);
      out.rhs = detail::sorted_set(a.rhs);
      break;
  }
  return out;
}

namespace detail {
inline std::string join(const VarTuple& t) {
  if (t.empty()) return "()";
  std::string s;
  for (const auto& v : t) s += (s.empty() ? "" : " ") + v;
  return s;
}
}  // namespace detail

inline std::string print(const Atom& atom) {
  Atom a = canonicalize(atom);
  using detail::join;
  switch (a.kind) {
    case AtomKind::FD: return a.lhs.empty() ? "const(" + join(a.rhs) + ")" : join(a.lhs) + " -> " + join(a.rhs);
    case AtomKind::IND: return join(a.lhs) + " <= " + join(a.rhs);
    case AtomKind::INDStar: return join(a.lhs) + " <* " + join(a.rhs);
    case AtomKind::MI: return join(a.lhs) + " == " + join(a.rhs);
    case AtomKind::MDE: return join(a.lhs) + " =* " + join(a.rhs);
    case AtomKind::CI: {
      std::string s = join(a.lhs) + " _||_ " + join(a.rhs);
      if (!a.cond.empty()) s += " | " + join(a.cond);
      return s;
    }
  }
  return "";
}

inline Atom parse_atom(const std::string& text) {
  struct Tok {
    std::string s;
    bool ident;
    std::size_t pos;
  };
  std::vector<Tok> toks;
  static const char* ops[] = {"_||_", "->", "<=", "<*", "==", "=*", "|", "(", ")"};
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const char* op : ops) {
      std::size_t n = std::char_traits<char>::length(op);
      if (text.compare(i, n, op) == 0) {
        toks.push_back({op, false, i});
        i += n;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    auto ident_char = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
    };
    if (!ident_char(text[i])) throw ParseError(std::string("unexpected character '") + text[i] + "'", i);
    std::size_t start = i;
    while (i < text.size() && ident_char(text[i]) && text.compare(i, 4, "_||_") != 0) ++i;
    toks.push_back({text.substr(start, i - start), true, start});
  }
  std::size_t p = 0;
  auto at_end = [&] { return p >= toks.size(); };
  auto pos = [&] { return at_end() ? text.size() : toks[p].pos; };
  auto read_vars = [&](bool allow_empty) {
    VarTuple vs;
    if (!at_end() && toks[p].s == "(" && p + 1 < toks.size() && toks[p + 1].s == ")") {
      if (!allow_empty) throw ParseError("empty tuple not allowed here", pos());
      p += 2;
      return vs;
    }
    while (!at_end() && toks[p].ident) vs.push_back(toks[p++].s);
    if (vs.empty()) throw ParseError("expected variables", pos());
    return vs;
  };
  if (toks.size() >= 2 && toks[0].ident && toks[0].s == "const" && toks[1].s == "(") {
    p = 2;
    VarTuple vs = read_vars(false);
    if (at_end() || toks[p].s != ")") throw ParseError("expected ')'", pos());
    ++p;
    if (!at_end()) throw ParseError("trailing input", pos());
    return Atom::ca(vs);
  }
  VarTuple left = read_vars(true);
  if (at_end()) throw ParseError("expected an operator", pos());
  std::string op = toks[p++].s;
  VarTuple right = read_vars(true);
  VarTuple cond;
  if (op == "_||_" && !at_end() && toks[p].s == "|") {
    ++p;
    cond = read_vars(true);
  }
  if (!at_end()) throw ParseError("trailing input", pos());
  if (op == "->") return Atom::fd(left, right);
  if (op == "<=") return Atom::ind(left, right);
  if (op == "<*") return Atom::ind_star(left, right);
  if (op == "==") return Atom::mi(left, right);
  if (op == "=*") return Atom::mde(left, right);
  if (op == "_||_") return Atom::ci(cond, left, right);
  throw ParseError("unknown operator '" + op + "'", 0);
}

// The saturated independence that the multivalued dependency cond ->> rhs
// abbreviates over D.
inline Atom mvd_notation(const VarTuple& cond, const VarTuple& rhs, const Schema& D) {
  for (const auto& v : cond) D.index(v);
  for (const auto& v : rhs) D.index(v);
  auto in = [](const VarTuple& t, const Var& v) { return std::find(t.begin(), t.end(), v) != t.end(); };
  VarTuple c = detail::sorted_set(cond), left, right;
  for (const auto& v : detail::sorted_set(rhs))
    if (!in(c, v)) left.push_back(v);
  for (const auto& v : D.vars())
    if (!in(c, v) && !in(rhs, v)) right.push_back(v);
  std::sort(right.begin(), right.end());
  return Atom::ci(c, left, right);
}

inline bool is_saturated(const Atom& a, const Schema& D) {
  if (a.kind != AtomKind::CI) return false;
  auto vs = a.vars();
  if (vs.size() != D.size()) return false;
  for (const auto& v : vs)
    if (!D.contains(v)) return false;
  return true;
}

// Membership of a single atom in a named class.
inline bool class_admits(const std::string& cls, const Atom& a, const Schema& D) {
  const bool fd = a.kind == AtomKind::FD;
  const bool u = a.unary();
  if (cls == "UCA") return fd && a.is_ca() && a.rhs.size() == 1;
  if (cls == "CA") return fd && a.is_ca();
  if (cls == "UFD") return fd && u;
  if (cls == "FD") return fd;
  if (cls == "UIND") return a.kind == AtomKind::IND && u;
  if (cls == "IND") return a.kind == AtomKind::IND;
  if (cls == "UINDStar") return a.kind == AtomKind::INDStar && u;
  if (cls == "INDStar") return a.kind == AtomKind::INDStar;
  if (cls == "UMI") return a.kind == AtomKind::MI && u;
  if (cls == "MI") return a.kind == AtomKind::MI;
  if (cls == "UMDE") return a.kind == AtomKind::MDE && u;
  if (cls == "MDE") return a.kind == AtomKind::MDE;
  if (cls == "IA") return a.is_ia();
  if (cls == "SCI") return is_saturated(a, D);
  if (cls == "CI") return a.kind == AtomKind::CI;
  auto plus = cls.find('+');
  if (plus == std::string::npos) return false;
  std::size_t start = 0;
  while (start <= cls.size()) {
    auto end = cls.find('+', start);
    if (end == std::string::npos) end = cls.size();
    if (class_admits(cls.substr(start, end - start), a, D)) return true;
    start = end + 1;
  }
  return false;
}

// Named classes in the order classify tries them; the first that admits every
// atom is reported.
inline const std::vector<std::string>& named_classes() {
  static const std::vector<std::string> v = {
      "UCA", "CA", "UFD", "FD", "UIND", "IND", "UINDStar", "INDStar", "UMI", "MI",
      "UMDE", "MDE", "IA", "SCI", "CI", "FD+UMI", "SCI+FD", "FD+UMI+UMDE",
      "FD+UIND+SCI", "FD+UMI+SCI", "UFD+UIND+IA", "UFD+UMI+IA", "IA+UCA+UMI+UMDE"};
  return v;
}

struct AtomClass {
  std::string label;
  bool named = false;  // false when no class from named_classes() covers the set
};

inline AtomClass classify(const std::vector<Atom>& atoms, const Schema& D) {
  for (const auto& a : atoms)
    for (const auto& v : a.vars()) D.index(v);
  for (const auto& cls : named_classes()) {
    bool all = std::all_of(atoms.begin(), atoms.end(), [&](const Atom& a) { return class_admits(cls, a, D); });
    if (all) return {cls, true};
  }
  // Fallback: join the families, each marked unary when all its atoms are.
  static const std::vector<std::pair<std::string, std::function<bool(const Atom&)>>> fams = {
      {"FD", [](const Atom& a) { return a.kind == AtomKind::FD; }},
      {"IND", [](const Atom& a) { return a.kind == AtomKind::IND; }},
      {"INDStar", [](const Atom& a) { return a.kind == AtomKind::INDStar; }},
      {"MI", [](const Atom& a) { return a.kind == AtomKind::MI; }},
      {"MDE", [](const Atom& a) { return a.kind == AtomKind::MDE; }},
      {"CI", [](const Atom& a) { return a.kind == AtomKind::CI; }}};
  std::string label;
  for (const auto& [name, pred] : fams) {
    bool any = false, allu = true, allia = true, allsci = true;
    for (const auto& a : atoms)
      if (pred(a)) any = true, allu &= a.unary(), allia &= a.is_ia(), allsci &= is_saturated(a, D);
    if (!any) continue;
    std::string f = name;
    if (name == "CI") f = allsci ? "SCI" : allia ? "IA" : "CI";
    else if (allu) f = "U" + name;
    label += (label.empty() ? "" : "+") + f;
  }
  return {label, false};
}

inline VarTuple vars_of(const std::vector<Atom>& atoms) {
  VarTuple out;
  for (const auto& a : atoms)
    for (const auto& v : a.vars())
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

}  // namespace kdep
