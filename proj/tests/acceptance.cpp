// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// A criterion's time limit is part of the criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kdep/kdep.hpp"

using namespace kdep;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double t = seconds_since(t0);
  bool in_time = t < limit_s;
  bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " [" << o.detail << "; " << t
       << " s, limit " << limit_s << " s" << (in_time ? "" : ", TOO SLOW") << "]";
  std::cout << line.str() << std::endl;
}

VarTuple names(int n) {
  VarTuple vs;
  for (int i = 0; i < n; ++i) vs.push_back(std::string(1, static_cast<char>('a' + i)));
  return vs;
}

// Random atom generators over a variable list.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng() % n); }
  bool coin() { return rng() % 2; }
  const Var& pick(const VarTuple& vs) { return vs[below(vs.size())]; }
  VarTuple subset(const VarTuple& vs, int p3 = 1) {
    VarTuple s;
    for (const auto& v : vs)
      if (static_cast<int>(below(3)) < p3) s.push_back(v);
    return s;
  }
  VarTuple distinct(const VarTuple& vs, std::size_t k) {
    VarTuple s = vs;
    std::shuffle(s.begin(), s.end(), rng);
    s.resize(std::min(k, s.size()));
    return s;
  }
  // Two repetition-free sides of equal length.
  std::pair<VarTuple, VarTuple> sides(const VarTuple& vs, std::size_t max_len) {
    std::size_t k = 1 + below(std::min(max_len, vs.size()));
    return {distinct(vs, k), distinct(vs, k)};
  }
  // Disjoint nonempty x, y.
  std::optional<std::pair<VarTuple, VarTuple>> split(const VarTuple& vs) {
    VarTuple x, y;
    for (const auto& v : vs) {
      auto c = below(3);
      if (c == 0) x.push_back(v);
      else if (c == 1) y.push_back(v);
    }
    if (x.empty() || y.empty()) return std::nullopt;
    return std::make_pair(x, y);
  }
  Atom sci(const Schema& D) {
    for (;;) {
      VarTuple c, y;
      for (const auto& v : D.vars()) {
        auto r = below(3);
        if (r == 0) c.push_back(v);
        else if (r == 1) y.push_back(v);
      }
      Atom a = mvd_notation(c, y, D);
      if (!a.lhs.empty() && !a.rhs.empty()) return a;
    }
  }
};

// --- criterion 1 ---------------------------------------------------------

Outcome example_judgments() {
  const auto& N = Semiring::naturals();
  auto X = table1_team(N, N.make(1), N.make(1), N.make(3));
  const std::vector<std::pair<const char*, bool>> cases = {
      {"x -> z", true},  {"x -> y", false}, {"const(w)", true}, {"const(z)", false}, {"x <= v", true},
      {"x == v", true},  {"x <= z", false}, {"x == z", false},  {"x <* z", true},    {"x =* z", true},
      {"x <* w", false}, {"x =* w", false}, {"x _||_ w", true}, {"y _||_ x | w", false}};
  int match = 0;
  std::string bad;
  for (const auto& [t, expect] : cases) {
    if (satisfies(X, parse_atom(t)) == expect) ++match;
    else bad += std::string(" ") + t;
  }
  return {match == 14, std::to_string(match) + "/14 judgments match" + (bad.empty() ? "" : ", wrong:" + bad)};
}

// --- criterion 2 ---------------------------------------------------------

Outcome semiring_laws() {
  bool ok = true;
  std::string detail;
  int laws = 0;
  for (auto id : kAllSemirings) {
    const auto& K = Semiring::get(id);
    auto rep = check_axioms(K);
    for (const auto& c : rep.checks) {
      ++laws;
      if (!c.pass()) ok = false, detail += " " + K.name + ":" + c.law;
    }
    bool expect_pair = id == SemiringId::Boolean || id == SemiringId::Tropical || id == SemiringId::Viterbi;
    const auto* ap = rep.find("has_absorbing_pair");
    if (!ap || ap->holds != expect_pair || K.flags.has_absorbing_pair != expect_pair)
      ok = false, detail += " " + K.name + ":absorbing-pair";
  }
  return {ok, std::to_string(laws) + " law/flag checks over 5 semirings" + (ok ? "" : ", failing:" + detail)};
}

// --- criterion 3 ---------------------------------------------------------

Outcome cancellation_split() {
  const Atom xy = parse_atom("x <= y"), yx = parse_atom("y <= x");
  bool ok = true;
  std::string detail;
  for (auto id : kAllSemirings) {
    const auto& K = Semiring::get(id);
    bool expect = !K.flags.additively_cancellative;
    bool found = refute({xy}, yx, K, {3, 2, {}}).has_value();
    detail += K.name + (found ? "=witness " : "=none ");
    if (found != expect) ok = false;
  }
  const auto& V = Semiring::viterbi();
  auto T = table1_team(V, V.one(), V.make(1, 2), V.zero());
  bool table = satisfies(T, parse_atom("x <* y")) && !satisfies(T, parse_atom("y <* x"));
  detail += table ? "; viterbi table team separates the IND* directions" : "; viterbi table team WRONG";
  return {ok && table, detail};
}

// --- criterion 4 ---------------------------------------------------------

Outcome soundness() {
  std::set<Rule> rules;
  for (const auto& n : AxiomSystem::names())
    for (Rule r : AxiomSystem::named(n).rules) rules.insert(r);
  std::size_t pairs = 0, violations = 0, starved = 0, trials = 0;
  std::string bad;
  for (Rule r : rules)
    for (auto id : kAllSemirings) {
      const auto& K = Semiring::get(id);
      bool compatible = true;
      for (const auto& f : rule_requirements(r)) compatible = compatible && flag_value(K.flags, f);
      if (!compatible) continue;
      auto st = fuzz_rule(r, K, 1000, 2024);
      ++pairs;
      trials += st.trials;
      starved += st.starved;
      if (!st.violations.empty()) {
        violations += st.violations.size();
        bad += " " + st.rule + "/" + K.name;
      }
    }
  bool cycles = rules.count(Rule::CYCLE_UIND) && rules.count(Rule::CYCLE_UMI) && rules.count(Rule::CYCLE_UMDE);
  auto control = noncommutative_ia2_control(1000, 2024);
  std::ostringstream d;
  d << rules.size() << " rules, " << pairs << " (rule, semiring) pairs, " << trials << " trials, " << violations
    << " violations, " << starved << " starved trials; control " << control.violations.size() << " violations";
  if (!bad.empty()) d << ";" << bad;
  return {violations == 0 && cycles && !control.violations.empty(), d.str()};
}

// --- criterion 5 ---------------------------------------------------------

struct AgreementCase {
  std::string cls;
  std::vector<SemiringId> semirings;
  std::function<Atom(Gen&, const Schema&)> atom;
};

Outcome oracle_agreement() {
  const std::vector<AgreementCase> cases = {
      {"MI", {kAllSemirings.begin(), kAllSemirings.end()},
       [](Gen& g, const Schema& D) {
         auto [l, r] = g.sides(D.vars(), 2);
         return Atom::mi(l, r);
       }},
      {"UINDStar", {SemiringId::Tropical},
       [](Gen& g, const Schema& D) { return Atom::ind_star({g.pick(D.vars())}, {g.pick(D.vars())}); }},
      {"IND", {SemiringId::Boolean, SemiringId::Tropical, SemiringId::Viterbi},
       [](Gen& g, const Schema& D) {
         auto [l, r] = g.sides(D.vars(), 2);
         return Atom::ind(l, r);
       }},
      {"FD+UMI+UMDE", {SemiringId::Naturals},
       [](Gen& g, const Schema& D) {
         const auto& v = D.vars();
         switch (g.below(3)) {
           case 0: return Atom::fd(g.subset(v), {g.pick(v)});
           case 1: return Atom::mi({g.pick(v)}, {g.pick(v)});
           default: return Atom::mde({g.pick(v)}, {g.pick(v)});
         }
       }},
      {"IA+UCA+UMI+UMDE", {SemiringId::NonNegRationals},
       [](Gen& g, const Schema& D) {
         const auto& v = D.vars();
         for (;;) {
           switch (g.below(4)) {
             case 0:
               if (auto s = g.split(v)) return Atom::ia(s->first, s->second);
               break;
             case 1: return Atom::ca({g.pick(v)});
             case 2: return Atom::mi({g.pick(v)}, {g.pick(v)});
             default: return Atom::mde({g.pick(v)}, {g.pick(v)});
           }
         }
       }},
  };
  const SearchBounds small{4, 3, {}};
  std::size_t runs = 0, yes = 0, no = 0, disagreements = 0;
  std::string first;
  auto disagree = [&](const std::string& what) {
    ++disagreements;
    if (first.empty()) first = what;
  };
  Gen g(55);
  for (const auto& c : cases)
    for (auto sid : c.semirings) {
      const auto& K = Semiring::get(sid);
      for (int i = 0; i < 200; ++i) {
        const int n = 2 + static_cast<int>(g.below(2));
        Schema D(names(n));
        std::vector<Atom> sigma;
        std::size_t m = g.below(4);
        for (std::size_t j = 0; j < m; ++j) sigma.push_back(c.atom(g, D));
        Atom tau = c.atom(g, D);
        ++runs;
        std::string tag = c.cls + "/" + K.name + " #" + std::to_string(i);
        Decision d = implies(sigma, tau, K, D);
        // Gating may route to a narrower class; only an unsupported answer counts against it.
        if (d.answer == Answer::Unsupported) {
          disagree(tag + ": unsupported, " + d.reason);
          continue;
        }
        if (d.answer == Answer::Yes) {
          ++yes;
          if (refute(sigma, tau, K, small, D)) disagree(tag + ": derivable but refuted");
        } else {
          ++no;
          try {
            KTeam X = build_counterexample(d, K);
            if (!satisfies_all(X, sigma) || satisfies(X, tau)) disagree(tag + ": witness does not separate");
          } catch (const std::exception& e) {
            disagree(tag + ": " + e.what());
          }
        }
      }
    }
  std::ostringstream d;
  d << runs << " instances (" << yes << " derivable, " << no << " not), " << disagreements << " disagreements";
  if (!first.empty()) d << "; first: " << first;
  return {disagreements == 0, d.str()};
}

// --- criterion 6 ---------------------------------------------------------

Outcome armstrong_exactness() {
  Gen g(66);
  std::size_t atoms = 0, mismatches = 0, graph_fail = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(g.below(5));
    Schema D(names(n));
    const auto& v = D.vars();
    std::vector<Atom> sigma;
    std::size_t m = g.below(7);
    for (std::size_t j = 0; j < m; ++j) {
      switch (g.below(3)) {
        case 0: sigma.push_back(Atom::fd(g.subset(v), {g.pick(v)})); break;
        case 1: sigma.push_back(Atom::mi({g.pick(v)}, {g.pick(v)})); break;
        default: sigma.push_back(Atom::mde({g.pick(v)}, {g.pick(v)})); break;
      }
    }
    auto X = armstrong_fd_umi_umde(sigma, D, Semiring::naturals());
    auto r = armstrong_sweep(X, sigma);
    atoms += r.checked;
    mismatches += r.mismatches.size();
    auto rep = check_graph_properties(build_graph(closure(sigma, AxiomSystem::named("FD+UMI+UMDE"), D)));
    if (!rep.all_pass()) ++graph_fail;
  }
  std::ostringstream d;
  d << "100 teams, " << atoms << " atoms swept, " << mismatches << " mismatches, " << graph_fail
    << " graphs failing a property";
  return {mismatches == 0 && graph_fail == 0, d.str()};
}

// --- criterion 7 ---------------------------------------------------------

Outcome reduction_equivalence() {
  Gen g(77);
  const auto& B = Semiring::boolean();
  const auto direct_sys = AxiomSystem::named("FD+UMI+SCI");
  const auto red_sys = AxiomSystem::named("FD+UIND+SCI");
  // Derivable instances must survive {4 rows, 3 values}; for the others a
  // witness is looked for cheapest bounds first.
  const SearchBounds exhaustive{4, 3, {}};
  const std::vector<SearchBounds> plan = {{2, 2, {}}, {4, 2, {}}, {6, 2, {}}, {3, 3, {}}, {4, 3, {}}};
  std::size_t yes = 0, no = 0, bad = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(g.below(3));
    Schema D(names(n));
    const auto& v = D.vars();
    auto atom = [&]() -> Atom {
      switch (g.below(3)) {
        case 0: return Atom::fd(g.subset(v), {g.pick(v)});
        case 1: return Atom::mi({g.pick(v)}, {g.pick(v)});
        default: return g.sci(D);
      }
    };
    std::vector<Atom> sigma;
    std::size_t m = g.below(5);
    for (std::size_t j = 0; j < m; ++j) sigma.push_back(atom());
    Atom tau = atom();
    auto red = sigma_star(sigma, tau);
    auto cl = closure(red.sigma, red_sys, D);
    bool via_reduction = std::all_of(red.goals.begin(), red.goals.end(), [&](const Atom& a) { return cl.contains(a); });
    bool via_direct = closure(sigma, direct_sys, D).contains(canonicalize(tau));
    bool refuted = false;
    if (via_direct) {
      refuted = refute(sigma, tau, B, exhaustive, D).has_value();
    } else {
      for (const auto& b : plan)
        if ((refuted = refute(sigma, tau, B, b, D).has_value())) break;
    }
    (via_direct ? yes : no)++;
    if (via_reduction != via_direct || refuted == via_direct) {
      ++bad;
      if (first.empty()) {
        std::ostringstream s;
        s << "#" << i << " reduction=" << via_reduction << " direct=" << via_direct << " refuted=" << refuted;
        first = s.str();
      }
    }
  }
  std::ostringstream d;
  d << "200 instances (" << yes << " derivable, " << no << " not), " << bad << " disagreements";
  if (!first.empty()) d << "; first: " << first;
  return {bad == 0, d.str()};
}

// --- criterion 8 ---------------------------------------------------------

// Closure of 100 random FD+UIND+SCI atoms over n variables, then every unary
// FD and UIND and the attribute closure of every left side in sigma is read
// off. Returns the best of `repeats` runs.
double closure_workload(int n, std::uint64_t seed, int repeats) {
  Gen g(seed);
  VarTuple vs;
  for (int i = 0; i < n; ++i) vs.push_back("v" + std::to_string(i));
  Schema D(vs);
  std::vector<Atom> sigma;
  while (sigma.size() < 100) {
    switch (g.below(3)) {
      case 0: {
        auto l = g.distinct(vs, 1 + g.below(3));
        sigma.push_back(Atom::fd(l, g.distinct(vs, 1 + g.below(2))));
        break;
      }
      case 1: sigma.push_back(Atom::ind({g.pick(vs)}, {g.pick(vs)})); break;
      default: {
        VarTuple c = g.distinct(vs, g.below(4)), y;
        for (const auto& v : vs)
          if (std::find(c.begin(), c.end(), v) == c.end() && g.coin()) y.push_back(v);
        Atom a = mvd_notation(c, y, D);
        if (!a.lhs.empty() && !a.rhs.empty()) sigma.push_back(a);
      }
    }
  }
  const auto sys = AxiomSystem::named("FD+UIND+SCI");
  double best = 1e300;
  volatile std::size_t sink = 0;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = Clock::now();
    auto cl = closure(sigma, sys, D);
    for (const auto& x : vs)
      for (const auto& y : vs) {
        sink = sink + cl.contains(Atom::fd({x}, {y}));
        sink = sink + cl.contains(Atom::ind({x}, {y}));
      }
    for (const auto& a : sigma)
      if (a.kind == AtomKind::FD)
        for (const auto& y : vs) sink = sink + cl.contains(Atom::fd(a.lhs, {y}));
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

Outcome scaling() {
  double t20 = 0, t40 = 0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    t20 += closure_workload(20, s, 3);
    t40 += closure_workload(40, s, 3);
  }
  t20 /= 3, t40 /= 3;
  // Below a millisecond the ratio is timer noise; the 8x bound is then met trivially.
  double ratio = t40 / std::max(t20, 1e-3);
  std::ostringstream d;
  d.setf(std::ios::fixed);
  d.precision(4);
  d << "|D|=20: " << t20 << " s, |D|=40: " << t40 << " s, ratio ";
  d.precision(2);
  d << ratio;
  return {t20 < 10.0 && ratio < 8.0, d.str()};
}

}  // namespace

int main() {
  criterion(1, "satisfaction judgments on the three-row naturals team", 1, example_judgments);
  criterion(2, "semiring law suite and capability flags", 5, semiring_laws);
  criterion(3, "IND symmetry refuted exactly over non-cancellative semirings", 10, cancellation_split);
  criterion(4, "soundness fuzz of every rule, with negative control", 300, soundness);
  criterion(5, "decisions agree with bounded refutation and constructions", 600, oracle_agreement);
  criterion(6, "Armstrong team exactness and graph properties", 120, armstrong_exactness);
  criterion(7, "UMI-to-UIND reduction agrees with direct closure and refutation", 300, reduction_equivalence);
  criterion(8, "closure scaling for FD+UIND+SCI", 60, scaling);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
