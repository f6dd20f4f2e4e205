#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "kdep/error.hpp"
#include "kdep/semiring.hpp"

namespace kdep {

enum class Rule {
  FD1, FD2, FD3, UFD1, UFD2, UFD3,
  IND1, IND2, IND3, UIND1, UIND2,
  MI1, MI2, MI3, MI4, UMI1, UMI2, UMI3,
  INDS1, INDS2, INDS3, UINDS1, UINDS2,
  MDE1, MDE2, MDE3, MDE4, UMDE1, UMDE2, UMDE3,
  IA1, IA2, IA3, IA4,
  CI1, CI2, CI3, CI4, CI5,
  SCI1, SCI2, SCI3, SCI4,
  MI_MDE, UMI_UMDE, CA_MDE1, CA_MDE2, UCA_UMDE1, UCA_UMDE2,
  IA_FD1, IA_FD2, SCI_FD1, SCI_FD2,
  CYCLE_UIND, CYCLE_UMI, CYCLE_UMDE,
  COUNT
};

inline constexpr std::size_t kRuleCount = static_cast<std::size_t>(Rule::COUNT);

inline const char* rule_name(Rule r) {
  static const std::array<const char*, kRuleCount> names = {
      "FD1", "FD2", "FD3", "UFD1", "UFD2", "UFD3",
      "IND1", "IND2", "IND3", "UIND1", "UIND2",
      "MI1", "MI2", "MI3", "MI4", "UMI1", "UMI2", "UMI3",
      "IND*1", "IND*2", "IND*3", "UIND*1", "UIND*2",
      "MDE1", "MDE2", "MDE3", "MDE4", "UMDE1", "UMDE2", "UMDE3",
      "IA1", "IA2", "IA3", "IA4",
      "CI1", "CI2", "CI3", "CI4", "CI5",
      "SCI1", "SCI2", "SCI3", "SCI4",
      "MI&MDE", "UMI&UMDE", "CA&MDE1", "CA&MDE2", "UCA&UMDE1", "UCA&UMDE2",
      "IA&FD1", "IA&FD2", "SCI&FD1", "SCI&FD2",
      "CYCLE-UIND", "CYCLE-UMI", "CYCLE-UMDE"};
  return names[static_cast<std::size_t>(r)];
}

inline Rule rule_by_name(const std::string& n) {
  for (std::size_t i = 0; i < kRuleCount; ++i)
    if (n == rule_name(static_cast<Rule>(i))) return static_cast<Rule>(i);
  throw TypeError("unknown rule '" + n + "'");
}

// Rules whose premises must all be unary atoms.
inline bool rule_is_unary(Rule r) {
  switch (r) {
    case Rule::UFD1: case Rule::UFD2: case Rule::UFD3:
    case Rule::UIND1: case Rule::UIND2:
    case Rule::UMI1: case Rule::UMI2: case Rule::UMI3:
    case Rule::UINDS1: case Rule::UINDS2:
    case Rule::UMDE1: case Rule::UMDE2: case Rule::UMDE3:
    case Rule::UMI_UMDE: case Rule::UCA_UMDE1: case Rule::UCA_UMDE2:
    case Rule::CYCLE_UIND: case Rule::CYCLE_UMI: case Rule::CYCLE_UMDE:
      return true;
    default:
      return false;
  }
}

// Which semiring properties a rule needs to be sound (and, for IND rules, to
// be evaluable at all).
inline std::vector<std::string> rule_requirements(Rule r) {
  switch (r) {
    case Rule::IND1: case Rule::IND2: case Rule::IND3: case Rule::UIND1: case Rule::UIND2:
    case Rule::CYCLE_UIND:
      return {"totally_zero_min_ordered"};
    case Rule::IA1: case Rule::IA2: case Rule::IA3: case Rule::IA4:
    case Rule::CI1: case Rule::CI2: case Rule::CI3: case Rule::CI4: case Rule::CI5:
    case Rule::SCI1: case Rule::SCI2: case Rule::SCI3: case Rule::SCI4:
    case Rule::IA_FD1: case Rule::IA_FD2: case Rule::SCI_FD1: case Rule::SCI_FD2:
      return {"commutative_mul", "multiplicatively_cancellative"};
    default:
      return {};
  }
}

inline bool flag_value(const Flags& f, const std::string& name) {
  for (const auto& [n, v] : f.list())
    if (n == name) return v;
  throw TypeError("unknown flag '" + name + "'");
}

// The atoms a system talks about, as per-family switches. Built from a class
// label such as "FD+UMI+UMDE".
struct Language {
  enum Level { None = 0, UnaryConst = 1, Const = 2, Unary = 3, Full = 4 };
  int fd = None;  // UnaryConst: const(x) only; Const: any const; Unary: x -> y and const(x)
  int ind = None, indstar = None, mi = None, mde = None;  // None, Unary or Full
  bool ia = false, sci = false, ci = false;

  static Language of(const std::string& label) {
    Language L;
    std::size_t start = 0;
    while (start <= label.size()) {
      auto end = label.find('+', start);
      if (end == std::string::npos) end = label.size();
      std::string p = label.substr(start, end - start);
      auto up = [](int& slot, int lvl) { slot = std::max(slot, lvl); };
      if (p == "UCA") up(L.fd, UnaryConst);
      else if (p == "CA") up(L.fd, Const);
      else if (p == "UFD") up(L.fd, Unary);
      else if (p == "FD") up(L.fd, Full);
      else if (p == "UIND") up(L.ind, Unary);
      else if (p == "IND") up(L.ind, Full);
      else if (p == "UINDStar") up(L.indstar, Unary);
      else if (p == "INDStar") up(L.indstar, Full);
      else if (p == "UMI") up(L.mi, Unary);
      else if (p == "MI") up(L.mi, Full);
      else if (p == "UMDE") up(L.mde, Unary);
      else if (p == "MDE") up(L.mde, Full);
      else if (p == "IA") L.ia = true;
      else if (p == "SCI") L.sci = true;
      else if (p == "CI") L.ci = true;
      else throw TypeError("unknown atom family '" + p + "' in '" + label + "'");
      start = end + 1;
    }
    return L;
  }
};

struct AxiomSystem {
  std::string name;  // also the class label of the atoms it works on
  std::vector<Rule> rules;

  bool has(Rule r) const { return std::find(rules.begin(), rules.end(), r) != rules.end(); }
  Language language() const { return Language::of(name); }

  // Semiring properties needed for every rule of the system to be sound.
  std::vector<std::string> requirements() const {
    std::vector<std::string> out;
    for (Rule r : rules)
      for (auto& q : rule_requirements(r))
        if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
    return out;
  }
  std::vector<std::string> missing(const Flags& f) const {
    std::vector<std::string> out;
    for (auto& q : requirements())
      if (!flag_value(f, q)) out.push_back(q);
    return out;
  }

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> v = {
        "FD", "UFD", "IND", "UIND", "MI", "UMI", "INDStar", "UINDStar", "MDE", "UMDE",
        "IA", "CI", "SCI", "SCI+FD", "FD+UMI", "FD+UMI+UMDE", "IA+UCA+UMI+UMDE",
        "FD+UIND+SCI", "UFD+UIND+IA", "FD+UMI+SCI", "UFD+UMI+IA", "MI+MDE", "CA+MDE", "IA+FD"};
    return v;
  }

  static AxiomSystem named(const std::string& n) {
    using R = Rule;
    const std::vector<R> fd = {R::FD1, R::FD2, R::FD3}, ufd = {R::UFD1, R::UFD2, R::UFD3};
    const std::vector<R> ind = {R::IND1, R::IND2, R::IND3}, uind = {R::UIND1, R::UIND2};
    const std::vector<R> mi = {R::MI1, R::MI2, R::MI3, R::MI4}, umi = {R::UMI1, R::UMI2, R::UMI3};
    const std::vector<R> inds = {R::INDS1, R::INDS2, R::INDS3}, uinds = {R::UINDS1, R::UINDS2};
    const std::vector<R> mde = {R::MDE1, R::MDE2, R::MDE3, R::MDE4}, umde = {R::UMDE1, R::UMDE2, R::UMDE3};
    const std::vector<R> ia = {R::IA1, R::IA2, R::IA3, R::IA4};
    const std::vector<R> ci = {R::CI1, R::CI2, R::CI3, R::CI4, R::CI5};
    const std::vector<R> sci = {R::SCI1, R::SCI2, R::SCI3, R::SCI4};
    const std::vector<R> sci_fd = {R::SCI_FD1, R::SCI_FD2}, ia_fd = {R::IA_FD1, R::IA_FD2};
    auto cat = [](std::initializer_list<std::vector<R>> parts) {
      std::vector<R> out;
      for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
      return out;
    };
    AxiomSystem s{n, {}};
    if (n == "FD") s.rules = fd;
    else if (n == "UFD") s.rules = ufd;
    else if (n == "IND") s.rules = ind;
    else if (n == "UIND") s.rules = uind;
    else if (n == "MI") s.rules = mi;
    else if (n == "UMI") s.rules = umi;
    else if (n == "INDStar") s.rules = inds;
    else if (n == "UINDStar") s.rules = uinds;
    else if (n == "MDE") s.rules = mde;
    else if (n == "UMDE") s.rules = umde;
    else if (n == "IA") s.rules = ia;
    else if (n == "CI") s.rules = ci;
    else if (n == "SCI") s.rules = sci;
    else if (n == "SCI+FD") s.rules = cat({sci, fd, sci_fd});
    else if (n == "FD+UMI") s.rules = cat({fd, umi, {R::CYCLE_UMI}});
    else if (n == "FD+UMI+UMDE") s.rules = cat({fd, umi, umde, {R::UMI_UMDE, R::CYCLE_UMDE}});
    else if (n == "IA+UCA+UMI+UMDE")
      s.rules = cat({ia, {R::IA_FD1, R::UCA_UMDE1, R::UCA_UMDE2}, umi, umde, {R::UMI_UMDE}});
    else if (n == "FD+UIND+SCI") s.rules = cat({fd, uind, sci, sci_fd, {R::CYCLE_UIND}});
    else if (n == "UFD+UIND+IA") s.rules = cat({ufd, uind, ia, ia_fd, {R::CYCLE_UIND}});
    else if (n == "FD+UMI+SCI") s.rules = cat({fd, umi, sci, sci_fd, {R::CYCLE_UMI}});
    else if (n == "UFD+UMI+IA") s.rules = cat({ufd, umi, ia, ia_fd, {R::CYCLE_UMI}});
    else if (n == "MI+MDE") s.rules = cat({mi, mde, {R::MI_MDE}});
    else if (n == "CA+MDE") s.rules = cat({fd, mde, {R::CA_MDE1, R::CA_MDE2}});
    else if (n == "IA+FD") s.rules = cat({ia, fd, ia_fd});
    else throw TypeError("unknown axiom system '" + n + "'");
    return s;
  }
};

}  // namespace kdep
