#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdep/atoms.hpp"
#include "kdep/axioms.hpp"
#include "kdep/closure.hpp"
#include "kdep/cycles.hpp"
#include "kdep/error.hpp"
#include "kdep/kteam.hpp"
#include "kdep/semiring.hpp"

namespace kdep {

inline Schema schema_for(const std::vector<Atom>& sigma, const Atom& tau) {
  auto all = sigma;
  all.push_back(tau);
  return Schema(vars_of(all));
}

struct DeriveResult {
  bool holds = false;
  std::optional<Derivation> proof;  // set when the explicit engine was used
};

inline DeriveResult derives(const std::vector<Atom>& sigma, const Atom& tau, const AxiomSystem& sys,
                            const std::optional<Schema>& D = std::nullopt, Engine engine = Engine::Auto) {
  Schema S = D ? *D : schema_for(sigma, tau);
  for (const auto& v : tau.vars()) S.index(v);
  auto cl = closure(sigma, sys, S, engine);
  DeriveResult r;
  r.holds = cl.contains(tau);
  if (r.holds) r.proof = cl.proof(tau);
  return r;
}

// Replacement of unary marginal identities by pairs of unary inclusions, so
// that questions about FDs, UMIs and SCIs (or UFDs, UMIs and IAs) can be asked
// of the UIND systems.
struct Reduction {
  std::vector<Atom> sigma;
  std::vector<Atom> goals;  // all must be derived
  std::string target_system;
};

inline Reduction sigma_star(const std::vector<Atom>& sigma, const Atom& tau) {
  Schema D = schema_for(sigma, tau);
  auto all = sigma;
  all.push_back(tau);
  auto within = [&](const std::string& cls) {
    return std::all_of(all.begin(), all.end(), [&](const Atom& a) { return class_admits(cls, a, D); });
  };
  Reduction red;
  if (within("FD+UMI+SCI")) red.target_system = "FD+UIND+SCI";
  else if (within("UFD+UMI+IA")) red.target_system = "UFD+UIND+IA";
  else throw ClassError("reduction needs atoms from FD+UMI+SCI or UFD+UMI+IA, got " + classify(all, D).label);
  auto push = [](std::vector<Atom>& v, const Atom& a) {
    Atom c = canonicalize(a);
    if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
  };
  for (const auto& a : sigma) {
    if (a.kind == AtomKind::MI) {
      push(red.sigma, Atom::ind(a.lhs, a.rhs));
      push(red.sigma, Atom::ind(a.rhs, a.lhs));
    } else {
      push(red.sigma, a);
    }
  }
  if (tau.kind == AtomKind::MI) {
    push(red.goals, Atom::ind(tau.lhs, tau.rhs));
    push(red.goals, Atom::ind(tau.rhs, tau.lhs));
  } else {
    push(red.goals, tau);
  }
  return red;
}

enum class Answer { Yes, No, Unsupported };

inline const char* answer_name(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Unsupported: return "unsupported";
  }
  return "?";
}

inline nlohmann::ordered_json derivation_json(const Derivation& d) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : d.steps) steps.push_back({{"atom", print(s.atom)}, {"rule", s.rule}, {"premises", s.premises}});
  return steps;
}

inline nlohmann::ordered_json team_json(const KTeam& X) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<std::string> vals;
    for (Val v : X.row(i)) vals.push_back(X.format_val(v));
    rows.push_back({{"values", vals}, {"weight", X.semiring().format(X.weight(i))}});
  }
  return {{"semiring", X.semiring().name}, {"vars", X.schema().vars()}, {"rows", rows}, {"tsv", to_tsv(X)}};
}

struct Decision {
  Answer answer = Answer::Unsupported;
  std::string cls;       // class label of the effective atoms
  std::string semiring;  // semiring name
  SemiringId semiring_id = SemiringId::Boolean;
  std::string system;    // axiom system used, empty when unsupported
  std::string theorem;   // which completeness result justifies the answer
  std::string reason;    // why the question is unsupported
  std::string recipe;    // how a counterexample is built on "no"
  std::vector<std::string> missing;  // semiring properties lacking for a matching class
  std::vector<Atom> input_sigma;     // as given
  Atom input_tau;
  std::vector<Atom> sigma;  // after rewriting (collapse, splitting, reduction)
  std::vector<Atom> goals;
  Schema schema;
  std::vector<std::string> notes;  // rewriting steps applied
  std::optional<Derivation> proof;
  std::optional<Atom> failed_goal;
  std::optional<KTeam> counterexample;
  std::string counterexample_error;  // set when the witness search gave up

  int exit_code() const { return answer == Answer::Yes ? 0 : answer == Answer::No ? 1 : 2; }

  nlohmann::ordered_json to_json(bool with_proof = true, bool with_counterexample = true) const {
    nlohmann::ordered_json j = {{"answer", answer_name(answer)}, {"class", cls}, {"semiring", semiring}};
    j["system"] = system.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(system);
    j["theorem"] = theorem.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(theorem);
    if (!reason.empty()) j["reason"] = reason;
    if (!missing.empty()) j["missing"] = missing;
    std::vector<std::string> s, g;
    for (const auto& a : sigma) s.push_back(print(a));
    for (const auto& a : goals) g.push_back(print(a));
    j["sigma"] = s;
    j["goals"] = g;
    if (!notes.empty()) j["notes"] = notes;
    if (answer == Answer::No) {
      if (!recipe.empty()) j["recipe"] = recipe;
      if (failed_goal) j["failed_goal"] = print(*failed_goal);
    }
    if (with_proof && proof) j["proof"] = derivation_json(*proof);
    if (with_counterexample && counterexample) j["counterexample"] = team_json(*counterexample);
    if (with_counterexample && !counterexample_error.empty()) j["counterexample_error"] = counterexample_error;
    return j;
  }
};

namespace detail {

struct GateRow {
  std::string cls;
  std::string system;
  std::vector<std::string> flags;
  std::string theorem;
  std::string recipe;
  bool split = false;   // split FDs with at most one left variable into unary ones
  bool reduce = false;  // go through sigma_star
};

inline const std::vector<GateRow>& gate_rows() {
  const std::vector<std::string> idem = {"totally_zero_min_ordered", "multiplicatively_cancellative",
                                         "commutative_mul", "idempotent"};
  static const std::vector<GateRow> rows = {
      {"MI", "MI", {"positive"},
       "A_MI is sound and complete for MIs over any positive semiring",
       "single-row team on a non-derivable unary projection of the goal, else an exact LP over small values, else bounded search"},
      {"SCI+FD", "SCI+FD", {"commutative_mul", "multiplicatively_cancellative"},
       "A_SCI+FD is sound and complete for SCIs with FDs over commutative multiplicatively cancellative semirings",
       "bounded Boolean search, lifted with weight one"},
      {"FD+UMI+UMDE", "FD+UMI+UMDE", {"additively_cancellative"},
       "A_FD+UMI+UMDE is sound and complete for FDs with UMIs and UMDEs over additively cancellative semirings",
       "Armstrong team of the closure, weight one"},
      {"IA+UCA+UMI+UMDE", "IA+UCA+UMI+UMDE",
       {"additively_cancellative", "multiplicatively_cancellative", "commutative_mul"},
       "A_IA+UCA+UMI+UMDE is sound and complete over commutative semirings that are additively and "
       "multiplicatively cancellative",
       "single-row, product or parity team by the kind of the failed goal, weight one",
       true},
      {"UINDStar", "UINDStar", {"has_absorbing_pair"},
       "A_UIND* is sound and complete for UIND*s over semirings with nonzero a, b such that a+b=a",
       "two-row team weighted by the absorbing pair"},
      {"IND", "IND", {"totally_zero_min_ordered", "has_idempotent_nonzero"},
       "A_IND is sound and complete for INDs over totally zero-min ordered semirings with an idempotent nonzero element",
       "bounded Boolean search, lifted with an idempotent nonzero weight"},
      {"FD+UIND+SCI", "FD+UIND+SCI", idem,
       "A_FD+UIND+SCI is sound and complete over totally zero-min ordered, commutative, multiplicatively "
       "cancellative and idempotent semirings",
       "bounded Boolean search, lifted with an idempotent nonzero weight"},
      {"UFD+UIND+IA", "UFD+UIND+IA", idem,
       "A_UFD+UIND+IA is sound and complete over totally zero-min ordered, commutative, multiplicatively "
       "cancellative and idempotent semirings",
       "bounded Boolean search, lifted with an idempotent nonzero weight", true},
      {"FD+UMI+SCI", "FD+UIND+SCI", idem,
       "FD+UMI+SCI reduces to A_FD+UIND+SCI by reading each UMI as two UINDs, over the same semirings",
       "bounded Boolean search, lifted with an idempotent nonzero weight", false, true},
      {"UFD+UMI+IA", "UFD+UIND+IA", idem,
       "UFD+UMI+IA reduces to A_UFD+UIND+IA by reading each UMI as two UINDs, over the same semirings",
       "bounded Boolean search, lifted with an idempotent nonzero weight", true, true},
  };
  return rows;
}

// =(x, y1...yk) and const(y1...yk) as k unary atoms; everything else as is.
inline std::vector<Atom> split_unary(const std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  auto push = [&](const Atom& a) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  for (const auto& a : atoms) {
    if (a.kind == AtomKind::FD && a.lhs.size() <= 1 && a.rhs.size() > 1) {
      for (const auto& y : a.rhs) push(canonicalize(Atom::fd(a.lhs, {y})));
    } else {
      push(a);
    }
  }
  return out;
}

}  // namespace detail

// Decides Σ ⊨_K τ when some complete system covers the class and K, and
// refuses otherwise. Counterexamples for "no" are attached by the construct
// module (see attach_counterexample there).
inline Decision implies(const std::vector<Atom>& sigma_in, const Atom& tau_in, const Semiring& K,
                        const std::optional<Schema>& D_in = std::nullopt) {
  Decision dec;
  dec.semiring = K.name;
  dec.semiring_id = K.id;
  dec.input_sigma = sigma_in;
  dec.input_tau = tau_in;
  dec.schema = D_in ? *D_in : schema_for(sigma_in, tau_in);
  const Schema& D = dec.schema;
  for (const auto& a : sigma_in)
    for (const auto& v : a.vars()) D.index(v);
  for (const auto& v : tau_in.vars()) D.index(v);

  std::vector<Atom> sigma;
  for (const auto& a : sigma_in) sigma.push_back(canonicalize(a));
  Atom tau = canonicalize(tau_in);

  // Over additively cancellative K, <= coincides with == and <* with =*.
  if (K.flags.additively_cancellative) {
    bool changed = false;
    auto collapse = [&](Atom& a) {
      if (a.kind == AtomKind::IND) a = canonicalize(Atom::mi(a.lhs, a.rhs)), changed = true;
      else if (a.kind == AtomKind::INDStar) a = canonicalize(Atom::mde(a.lhs, a.rhs)), changed = true;
    };
    for (auto& a : sigma) collapse(a);
    collapse(tau);
    if (changed) dec.notes.push_back("INDs read as MIs and IND*s as MDEs (additively cancellative semiring)");
  }

  auto admitted = [&](const std::string& cls, const std::vector<Atom>& s, const std::vector<Atom>& g) {
    auto ok = [&](const Atom& a) { return class_admits(cls, a, D); };
    return std::all_of(s.begin(), s.end(), ok) && std::all_of(g.begin(), g.end(), ok);
  };
  {
    auto all = sigma;
    all.push_back(tau);
    dec.cls = classify(all, D).label;
  }
  dec.sigma = sigma;
  dec.goals = {tau};

  for (const auto& row : detail::gate_rows()) {
    std::vector<Atom> s = sigma, g = {tau};
    if (row.split) s = detail::split_unary(s), g = detail::split_unary(g);
    if (!admitted(row.cls, s, g)) continue;
    std::vector<std::string> lacking;
    for (const auto& f : row.flags)
      if (!flag_value(K.flags, f)) lacking.push_back(f);
    if (!lacking.empty()) {
      for (auto& f : lacking)
        if (std::find(dec.missing.begin(), dec.missing.end(), f) == dec.missing.end()) dec.missing.push_back(f);
      if (dec.reason.empty())
        dec.reason = "class " + row.cls + " needs a semiring that is " + [&] {
          std::string t;
          for (std::size_t i = 0; i < lacking.size(); ++i) t += (i ? ", " : "") + lacking[i];
          return t;
        }() + "; " + K.name + " is not";
      continue;
    }
    if (row.split && (s != sigma || g != std::vector<Atom>{tau}))
      dec.notes.push_back("FDs with at most one left variable split into unary FDs");
    if (row.reduce) {
      std::vector<Atom> goals;
      std::vector<Atom> rs;
      for (const auto& goal : g) {
        auto red = sigma_star(s, goal);
        rs = red.sigma;
        for (auto& x : red.goals)
          if (std::find(goals.begin(), goals.end(), x) == goals.end()) goals.push_back(x);
      }
      s = rs;
      g = goals;
      dec.notes.push_back("each UMI x == y read as x <= y and y <= x");
    }
    dec.cls = row.cls;
    dec.system = row.system;
    dec.theorem = row.theorem;
    dec.recipe = row.recipe;
    dec.reason.clear();
    dec.missing.clear();
    dec.sigma = s;
    dec.goals = g;
    auto cl = closure(s, AxiomSystem::named(row.system), D);
    for (const auto& goal : g)
      if (!cl.contains(goal)) {
        dec.answer = Answer::No;
        dec.failed_goal = goal;
        return dec;
      }
    dec.answer = Answer::Yes;
    dec.proof = cl.proof(g);
    return dec;
  }

  dec.answer = Answer::Unsupported;
  auto any = [&](auto pred) {
    return std::any_of(sigma_in.begin(), sigma_in.end(), pred) || pred(tau_in);
  };
  bool has_fd = any([](const Atom& a) { return a.kind == AtomKind::FD; });
  bool has_ind = any([](const Atom& a) { return a.kind == AtomKind::IND; });
  bool has_big_fd = any([](const Atom& a) { return a.kind == AtomKind::FD && !a.unary(); });
  bool has_ia = any([](const Atom& a) { return a.is_ia(); });
  if (has_fd && has_ind && dec.missing.empty())
    dec.reason = "implication for FDs together with INDs is undecidable; no complete system applies to " + dec.cls;
  else if (has_big_fd && has_ia && dec.missing.empty())
    dec.reason = "implication for FDs together with IAs is undecidable; only unary FDs with IAs are covered";
  else if (dec.reason.empty())
    dec.reason = "no complete axiomatization is available for class " + dec.cls + " over " + K.name;
  return dec;
}

}  // namespace kdep
