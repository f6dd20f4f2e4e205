#pragma once

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kdep/kdep.hpp"

namespace kdep::cli {

using json = nlohmann::ordered_json;

// Problem file:
//   semiring natural
//   vars x y z
//   assume x -> y
//   infer  x -> z
// Blank lines and lines starting with # are skipped.
struct Problem {
  std::string semiring = "boolean";
  bool semiring_given = false;
  std::optional<Schema> vars;
  std::vector<Atom> assume;
  std::optional<Atom> infer;

  Schema schema() const {
    if (vars) return *vars;
    auto all = assume;
    if (infer) all.push_back(*infer);
    return Schema(vars_of(all));
  }
  const Semiring& K() const { return Semiring::by_name(semiring); }
};

inline Problem parse_problem(std::istream& in) {
  Problem p;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { throw Error("syntax", "line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, line)) {
    ++lineno;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_first_of(" \t", b);
    std::string head = line.substr(b, e == std::string::npos ? std::string::npos : e - b);
    std::string rest = e == std::string::npos ? "" : line.substr(e + 1);
    rest.erase(0, rest.find_first_not_of(" \t"));
    rest.erase(rest.find_last_not_of(" \t\r") + 1);
    if (head == "semiring") {
      Semiring::by_name(rest);
      p.semiring = rest;
      p.semiring_given = true;
    } else if (head == "vars") {
      for (auto& c : rest)
        if (c == ',') c = ' ';
      std::istringstream ss(rest);
      VarTuple vs;
      for (std::string v; ss >> v;) vs.push_back(v);
      p.vars = Schema(vs);
    } else if (head == "assume" || head == "infer") {
      Atom a;
      try {
        a = parse_atom(rest);
      } catch (const Error& err) {
        fail(err.what());
      }
      if (p.vars)
        for (const auto& v : a.vars())
          if (!p.vars->contains(v)) throw SchemaError("line " + std::to_string(lineno) + ": undeclared variable '" + v + "'");
      if (head == "assume") {
        p.assume.push_back(a);
      } else {
        if (p.infer) fail("a problem has exactly one infer line");
        p.infer = a;
      }
    } else {
      fail("unknown directive '" + head + "'");
    }
  }
  return p;
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  return parse_problem(in);
}

inline std::vector<SearchBounds> parse_bounds(const std::string& spec) {
  std::size_t rows = 6, values = 3;
  std::istringstream ss(spec);
  for (std::string kv; std::getline(ss, kv, ',');) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("syntax", "bounds entry '" + kv + "' is not key=value");
    std::string k = kv.substr(0, eq);
    std::size_t v = 0;
    try {
      v = std::stoul(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error("syntax", "bounds value in '" + kv + "' is not a number");
    }
    if (k == "rows") rows = v;
    else if (k == "values") values = v;
    else throw Error("syntax", "unknown bounds key '" + k + "' (expected rows, values)");
  }
  if (rows < 1 || values < 1) throw Error("syntax", "bounds must be at least 1");
  return default_search_plan(rows, values);
}

inline std::vector<std::string> atom_texts(const std::vector<Atom>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(print(a));
  return out;
}

// check, closure, derive and satisfy report every error as 3; the commands
// that gate on the atom class or the semiring report gating failures as 2.
inline int exit_for(const Error& e, bool gating) {
  const auto& k = e.kind();
  if (gating && (k == "class" || k == "capability" || k == "precondition")) return 2;
  return 3;
}

struct Options {
  bool json = false;
  std::uint64_t seed = 1;
  std::string bounds;
  std::vector<SearchBounds> plan() const { return bounds.empty() ? default_search_plan() : parse_bounds(bounds); }
};

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline int cmd_check(const std::string& path, bool proof, bool cex, const Options& o, std::ostream& out) {
  auto p = load_problem(path);
  if (!p.infer) throw Error("syntax", path + ": no infer line");
  Decision d = implies(p.assume, *p.infer, p.K(), p.schema());
  if (cex) attach_counterexample(d, o.plan());
  emit(out, d.to_json(proof, cex));
  return d.exit_code();
}

inline int cmd_derive(const std::string& path, const Options& o, std::ostream& out) {
  auto p = load_problem(path);
  if (!p.infer) throw Error("syntax", path + ": no infer line");
  Decision d = implies(p.assume, *p.infer, p.K(), p.schema());
  if (o.json) {
    emit(out, d.to_json(true, false));
  } else if (d.answer == Answer::Yes) {
    if (d.proof) out << d.proof->to_text();
    else out << "derivable in " << d.system << " (the symbolic engine keeps no proof)\n";
  } else if (d.answer == Answer::No) {
    out << "not derivable in " << d.system << ": " << print(*d.failed_goal) << '\n';
  } else {
    out << "unsupported: " << d.reason << '\n';
  }
  return d.exit_code();
}

inline int cmd_closure(const std::string& path, const std::string& system, const Options& o, std::ostream& out) {
  auto p = load_problem(path);
  const Schema D = p.schema();
  std::string sys = system;
  std::vector<Atom> sigma = p.assume;
  if (sys.empty()) {
    if (!p.infer && p.assume.empty()) throw Error("syntax", "empty problem; name the system with --system");
    Decision d = implies(p.assume, p.infer ? *p.infer : p.assume.front(), p.K(), D);
    if (d.answer == Answer::Unsupported) throw ClassError(d.reason);
    sys = d.system;
    sigma = d.sigma;
  }
  auto cl = closure(sigma, AxiomSystem::named(sys), D, Engine::Explicit);
  auto atoms = cl.atoms();
  std::sort(atoms.begin(), atoms.end());
  if (o.json) {
    emit(out, json{{"system", sys}, {"vars", D.vars()}, {"atoms", atom_texts(atoms)}});
  } else {
    for (const auto& a : atoms) out << print(a) << '\n';
  }
  return 0;
}

inline std::vector<Atom> read_atoms(const std::string& file, const std::vector<std::string>& inline_atoms) {
  std::vector<Atom> out;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error("io", "cannot open " + file);
    for (std::string line; std::getline(in, line);) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      out.push_back(parse_atom(line));
    }
  }
  for (const auto& t : inline_atoms) out.push_back(parse_atom(t));
  return out;
}

inline int cmd_satisfy(const std::string& team, const std::string& semiring, const std::vector<Atom>& atoms,
                       const Options& o, std::ostream& out) {
  const auto& K = Semiring::by_name(semiring);
  std::ifstream in(team);
  if (!in) throw Error("io", "cannot open " + team);
  KTeam X = read_tsv(in, K);
  for (const auto& a : atoms)
    for (const auto& v : a.vars()) X.schema().index(v);
  json verdicts = json::array();
  bool all = true;
  for (const auto& a : atoms) {
    auto v = check(X, a);
    all = all && v.holds;
    json e{{"atom", print(a)}, {"holds", v.holds}};
    if (!v.holds) e["witness"] = v.witness;
    verdicts.push_back(e);
    if (!o.json) out << (v.holds ? "true  " : "false ") << print(a) << (v.holds ? "" : "    " + v.witness) << '\n';
  }
  if (o.json) emit(out, verdicts);
  return all ? 0 : 1;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("io", "cannot write " + path);
  f << text;
}

inline int cmd_armstrong(const std::string& path, const std::string& prefix, const Options& o, std::ostream& out) {
  auto p = load_problem(path);
  const Schema D = p.schema();
  const auto& K = p.semiring_given ? p.K() : Semiring::naturals();
  KTeam X = armstrong_fd_umi_umde(p.assume, D, K);
  auto G = build_graph(closure(p.assume, AxiomSystem::named("FD+UMI+UMDE"), D));
  auto sweep = armstrong_sweep(X, p.assume);
  std::string dot = to_dot(G);
  if (!prefix.empty()) {
    write_file(prefix + ".tsv", to_tsv(X));
    write_file(prefix + ".dot", dot);
  }
  if (o.json) {
    json j{{"semiring", K.name},
           {"team", team_json(X)},
           {"checked", sweep.checked},
           {"violates", atom_texts(sweep.violated)},
           {"exact", sweep.exact()},
           {"mismatches", atom_texts(sweep.mismatches)}};
    if (prefix.empty()) j["dot"] = dot;
    emit(out, j);
  } else {
    if (prefix.empty()) out << to_tsv(X) << '\n' << dot << '\n';
    std::string v;
    for (const auto& a : sweep.violated) v += (v.empty() ? "" : ", ") + print(a);
    out << "checked " << sweep.checked << " atoms, " << (sweep.exact() ? "exact" : "NOT exact") << "\n";
    out << "violates: " << (v.empty() ? "nothing" : v) << '\n';
    for (const auto& a : sweep.mismatches) out << "mismatch: " << print(a) << '\n';
  }
  return sweep.exact() ? 0 : 1;
}

inline int cmd_counterexample(const std::string& path, const Options& o, std::ostream& out) {
  auto p = load_problem(path);
  if (!p.infer) throw Error("syntax", path + ": no infer line");
  Decision d = implies(p.assume, *p.infer, p.K(), p.schema());
  if (d.answer == Answer::Unsupported) {
    if (o.json) emit(out, d.to_json(false, false));
    else out << "unsupported: " << d.reason << '\n';
    return 2;
  }
  if (d.answer == Answer::Yes) {
    if (o.json) emit(out, d.to_json(false, false));
    else out << "the implication holds; no counterexample\n";
    return 0;
  }
  attach_counterexample(d, o.plan());
  if (!d.counterexample) throw Error("bounds", d.counterexample_error);
  if (o.json) emit(out, team_json(*d.counterexample));
  else out << to_tsv(*d.counterexample);
  return 1;
}

inline int cmd_fuzz(const std::string& system, const std::string& semiring, std::size_t trials, bool control,
                    const Options& o, std::ostream& out) {
  if (control) {
    auto st = noncommutative_ia2_control(trials, o.seed);
    FuzzReport rep{"IA (non-commutative control)", "2x2 matrices", {}, {st}};
    emit(out, rep.to_json());
    return rep.violations() == 0 ? 0 : 1;
  }
  const auto& K = Semiring::by_name(semiring);
  auto rep = soundness_fuzz(AxiomSystem::named(system), K, trials, o.seed);
  if (!rep.missing.empty()) {
    std::string m;
    for (const auto& f : rep.missing) m += (m.empty() ? "" : ", ") + f;
    emit(out, rep.to_json());
    throw CapabilityError(system + " over " + K.name + " needs " + m);
  }
  emit(out, rep.to_json());
  return rep.violations() == 0 ? 0 : 1;
}

inline int cmd_graph(const std::string& path, const Options& o, std::ostream& out) {
  auto p = load_problem(path);
  const Schema D = p.schema();
  for (const auto& a : p.assume)
    if (!class_admits("FD+UMI+UMDE", a, D)) throw ClassError(print(a) + " is outside class FD+UMI+UMDE");
  auto G = build_graph(closure(p.assume, AxiomSystem::named("FD+UMI+UMDE"), D));
  auto rep = check_graph_properties(G);
  if (o.json) {
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back({{"law", c.law}, {"holds", c.holds}, {"witness", c.witness}});
    emit(out, json{{"dot", to_dot(G)}, {"checks", checks}});
  } else {
    out << to_dot(G);
  }
  return 0;
}

// Runs the command line; returns the process exit status.
inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"implication, closure and witnesses for dependency atoms over semiring teams", "kdep"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "JSON output");
  app.add_option("--seed", o.seed, "seed for fuzzing");
  app.add_option("--bounds", o.bounds, "witness search limits, e.g. rows=6,values=3");
  app.fallthrough();

  std::string file, system, semiring = "boolean", team, atoms_file, prefix;
  std::vector<std::string> inline_atoms;
  bool proof = false, cex = false, control = false;
  std::size_t trials = 1000;

  auto* check_c = app.add_subcommand("check", "decide an implication (exit 0 yes, 1 no, 2 unsupported)");
  check_c->add_option("problem", file)->required();
  check_c->add_flag("--proof", proof, "embed the derivation");
  check_c->add_flag("--counterexample", cex, "embed a witness team on no");

  auto* closure_c = app.add_subcommand("closure", "print the closure of the assumptions");
  closure_c->add_option("problem", file)->required();
  closure_c->add_option("--system", system, "axiom system, e.g. FD+UMI+UMDE");

  auto* derive_c = app.add_subcommand("derive", "print a derivation of the infer line");
  derive_c->add_option("problem", file)->required();

  auto* sat_c = app.add_subcommand("satisfy", "evaluate atoms on a team file");
  sat_c->add_option("team", team)->required();
  sat_c->add_option("atoms", inline_atoms, "atoms, e.g. \"x -> y\"");
  sat_c->add_option("--atoms-file", atoms_file, "one atom per line");
  sat_c->add_option("--semiring", semiring, "natural|boolean|nnrational|tropical|viterbi");

  auto* arm_c = app.add_subcommand("armstrong", "Armstrong team and graph for FDs, UMIs and UMDEs");
  arm_c->add_option("problem", file)->required();
  arm_c->add_option("--out", prefix, "write PREFIX.tsv and PREFIX.dot");

  auto* cex_c = app.add_subcommand("counterexample", "witness team for a failing implication");
  cex_c->add_option("problem", file)->required();

  auto* fuzz_c = app.add_subcommand("fuzz", "soundness fuzz of an axiom system");
  fuzz_c->add_option("--system", system, "axiom system")->required();
  fuzz_c->add_option("--semiring", semiring, "semiring");
  fuzz_c->add_option("--trials", trials, "trials per rule");
  fuzz_c->add_flag("--control", control, "run the non-commutative negative control instead");

  auto* graph_c = app.add_subcommand("graph", "DOT graph of the closure of FDs, UMIs and UMDEs");
  graph_c->add_option("problem", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "kdep: " << e.what() << '\n';
    return 3;
  }

  try {
    if (*check_c) return cmd_check(file, proof, cex, o, out);
    if (*closure_c) return cmd_closure(file, system, o, out);
    if (*derive_c) return cmd_derive(file, o, out);
    if (*sat_c) return cmd_satisfy(team, semiring, read_atoms(atoms_file, inline_atoms), o, out);
    if (*arm_c) return cmd_armstrong(file, prefix, o, out);
    if (*cex_c) return cmd_counterexample(file, o, out);
    if (*fuzz_c) return cmd_fuzz(system, semiring, trials, control, o, out);
    if (*graph_c) return cmd_graph(file, o, out);
  } catch (const Error& e) {
    err << "kdep: " << e.kind() << ": " << e.what() << '\n';
    return exit_for(e, *arm_c || *cex_c || *fuzz_c || *graph_c);
  } catch (const std::exception& e) {
    err << "kdep: " << e.what() << '\n';
    return 3;
  }
  return 3;
}

}  // namespace kdep::cli
