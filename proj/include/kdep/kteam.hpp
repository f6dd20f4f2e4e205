#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kdep/error.hpp"
#include "kdep/semiring.hpp"

namespace kdep {

using Var = std::string;
using VarTuple = std::vector<Var>;
// Values are opaque tokens. Non-negative ints are used directly; other tokens
// read from files are interned as negative ids (see KTeam::symbols).
using Val = int;
using Tuple = std::vector<Val>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const {
    std::size_t h = 1469598103934665603ULL;
    for (Val v : t) h = (h ^ static_cast<std::size_t>(v + 0x9e37)) * 1099511628211ULL;
    return h;
  }
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(VarTuple vars) : vars_(std::move(vars)) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (!index_.emplace(vars_[i], static_cast<int>(i)).second)
        throw SchemaError("duplicate variable '" + vars_[i] + "' in schema");
  }

  const VarTuple& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool contains(const Var& v) const { return index_.count(v) > 0; }
  int index(const Var& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw SchemaError("unknown variable '" + v + "'");
    return it->second;
  }
  std::vector<int> indices(const VarTuple& t) const {
    std::vector<int> out;
    out.reserve(t.size());
    for (const auto& v : t) out.push_back(index(v));
    return out;
  }
  bool operator==(const Schema& o) const { return vars_ == o.vars_; }

 private:
  VarTuple vars_;
  std::unordered_map<Var, int> index_;
};

// Counted bag of semiring values.
using MarginalMultiset = std::map<Value, std::size_t, Value::KeyLess>;

inline bool multiset_included(const MarginalMultiset& a, const MarginalMultiset& b) {
  for (const auto& [v, m] : a) {
    auto it = b.find(v);
    if (it == b.end() || it->second < m) return false;
  }
  return true;
}

class KTeam {
 public:
  KTeam(Schema schema, const Semiring& K) : schema_(std::move(schema)), K_(&K) {}

  const Schema& schema() const { return schema_; }
  const Semiring& semiring() const { return *K_; }
  std::size_t size() const { return rows_.size(); }
  const Tuple& row(std::size_t i) const { return rows_[i]; }
  const Value& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Tuple>& rows() const { return rows_; }
  const std::vector<Value>& weights() const { return weights_; }

  void add_row(Tuple s, Value w) {
    if (s.size() != schema_.size())
      throw ArityError("assignment has " + std::to_string(s.size()) + " values, schema has " +
                       std::to_string(schema_.size()));
    if (w.id() != K_->id) throw TypeError("row weight is not an element of " + K_->name);
    if (!seen_.insert(s).second) throw SchemaError("duplicate assignment in team");
    rows_.push_back(std::move(s));
    weights_.push_back(std::move(w));
  }

  // Search loops build teams row by row; they guarantee distinctness themselves.
  void push_unchecked(const Tuple& s, const Value& w) {
    rows_.push_back(s);
    weights_.push_back(w);
  }
  void pop_unchecked() {
    rows_.pop_back();
    weights_.pop_back();
  }

  std::vector<std::string>& symbols() { return symbols_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::string format_val(Val v) const {
    if (v >= 0) return std::to_string(v);
    std::size_t i = static_cast<std::size_t>(-v - 1);
    return i < symbols_.size() ? symbols_[i] : "?" + std::to_string(v);
  }

 private:
  Schema schema_;
  const Semiring* K_;
  std::vector<Tuple> rows_;
  std::vector<Value> weights_;
  std::unordered_set<Tuple, TupleHash> seen_;
  std::vector<std::string> symbols_;
};

// Rows grouped by their projection on `cols`: group id per row, one
// representative row per group, and the summed weight of each group.
struct Groups {
  std::vector<int> of_row;
  std::vector<int> rep;
  std::vector<Value> sum;
};

inline bool same_on(const Tuple& a, const Tuple& b, const std::vector<int>& cols) {
  for (int c : cols)
    if (a[c] != b[c]) return false;
  return true;
}

inline Groups group_by(const KTeam& X, const std::vector<int>& cols) {
  const auto& K = X.semiring();
  Groups g;
  const std::size_t n = X.size();
  g.of_row.resize(n);
  if (n <= 24) {
    for (std::size_t i = 0; i < n; ++i) {
      int found = -1;
      for (std::size_t k = 0; k < g.rep.size(); ++k)
        if (same_on(X.row(i), X.row(g.rep[k]), cols)) {
          found = static_cast<int>(k);
          break;
        }
      if (found < 0) {
        found = static_cast<int>(g.rep.size());
        g.rep.push_back(static_cast<int>(i));
        g.sum.push_back(X.weight(i));
      } else {
        g.sum[found] = K.add(g.sum[found], X.weight(i));
      }
      g.of_row[i] = found;
    }
    return g;
  }
  std::unordered_map<Tuple, int, TupleHash> ids;
  Tuple key(cols.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) key[c] = X.row(i)[cols[c]];
    auto [it, fresh] = ids.emplace(key, static_cast<int>(g.rep.size()));
    if (fresh) {
      g.rep.push_back(static_cast<int>(i));
      g.sum.push_back(X.weight(i));
    } else {
      g.sum[it->second] = K.add(g.sum[it->second], X.weight(i));
    }
    g.of_row[i] = it->second;
  }
  return g;
}

inline Tuple project(const Tuple& s, const std::vector<int>& cols) {
  Tuple t(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) t[i] = s[cols[i]];
  return t;
}

inline std::vector<Tuple> support(const KTeam& X) {
  std::vector<Tuple> out;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (!X.semiring().is_zero(X.weight(i))) out.push_back(X.row(i));
  return out;
}

inline Value marginal(const KTeam& X, const VarTuple& vars, const Tuple& vals) {
  if (vars.size() != vals.size())
    throw ArityError("marginal over " + std::to_string(vars.size()) + " variables given " +
                     std::to_string(vals.size()) + " values");
  auto cols = X.schema().indices(vars);
  const auto& K = X.semiring();
  Value acc = K.zero();
  for (std::size_t i = 0; i < X.size(); ++i) {
    bool match = true;
    for (std::size_t c = 0; c < cols.size() && match; ++c) match = X.row(i)[cols[c]] == vals[c];
    if (match) acc = K.add(acc, X.weight(i));
  }
  return acc;
}

inline Value total_weight(const KTeam& X) { return X.semiring().sum(X.weights()); }

inline std::set<Tuple> value_set(const KTeam& X, const VarTuple& vars) {
  auto cols = X.schema().indices(vars);
  auto g = group_by(X, cols);
  std::set<Tuple> out;
  for (std::size_t k = 0; k < g.rep.size(); ++k)
    if (!X.semiring().is_zero(g.sum[k])) out.insert(project(X.row(g.rep[k]), cols));
  return out;
}

inline MarginalMultiset multiset_of(const KTeam& X, const std::vector<int>& cols) {
  auto g = group_by(X, cols);
  MarginalMultiset m;
  for (const auto& s : g.sum)
    if (!X.semiring().is_zero(s)) ++m[s];
  return m;
}

inline MarginalMultiset marginal_multiset(const KTeam& X, const VarTuple& vars) {
  return multiset_of(X, X.schema().indices(vars));
}

inline KTeam normalize(const KTeam& X) {
  const auto& K = X.semiring();
  if (K.id != SemiringId::NonNegRationals)
    throw CapabilityError("normalize needs nnrational weights, team is over " + K.name);
  Value tot = total_weight(X);
  if (K.is_zero(tot)) throw DegenerateInput("cannot normalize a team of total weight zero");
  KTeam out(X.schema(), K);
  out.symbols() = X.symbols();
  for (std::size_t i = 0; i < X.size(); ++i) out.add_row(X.row(i), K.make(X.weight(i).q() / tot.q()));
  return out;
}

// Same supported rows as the Boolean team B, each weighted k in K.
inline KTeam lift_boolean(const KTeam& B, const Value& k, const Semiring& K) {
  if (B.semiring().id != SemiringId::Boolean) throw TypeError("lift_boolean expects a boolean team");
  if (k.id() != K.id) throw TypeError("lift weight is not an element of " + K.name);
  if (K.is_zero(k)) throw PreconditionError("lift weight must be nonzero");
  KTeam out(B.schema(), K);
  out.symbols() = B.symbols();
  for (std::size_t i = 0; i < B.size(); ++i)
    if (!B.semiring().is_zero(B.weight(i))) out.add_row(B.row(i), k);
  return out;
}

// Tab-separated team file: header = variable names then "#weight".
inline KTeam read_tsv(std::istream& in, const Semiring& K) {
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(l);
    while (std::getline(ss, cell, '\t')) {
      cell.erase(0, cell.find_first_not_of(" \r"));
      cell.erase(cell.find_last_not_of(" \r") + 1);
      out.push_back(cell);
    }
    return out;
  };
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  auto head = split(line);
  if (head.empty() || head.back() != "#weight") throw ParseError("team header must end with #weight", 0);
  head.pop_back();
  KTeam X(Schema(head), K);
  std::unordered_map<std::string, Val> interned;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (cells.size() != head.size() + 1)
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(head.size() + 1) + " (line " + std::to_string(lineno) + ")",
                       0);
    Tuple s;
    for (std::size_t c = 0; c < head.size(); ++c) {
      const auto& tok = cells[c];
      bool numeric = !tok.empty() && tok.size() < 9 &&
                     std::all_of(tok.begin(), tok.end(), [](unsigned char ch) { return std::isdigit(ch); });
      if (numeric) {
        s.push_back(std::stoi(tok));
      } else {
        auto [it, fresh] = interned.emplace(tok, -static_cast<Val>(X.symbols().size()) - 1);
        if (fresh) X.symbols().push_back(tok);
        s.push_back(it->second);
      }
    }
    X.add_row(std::move(s), K.parse(cells.back()));
  }
  return X;
}

inline void write_tsv(std::ostream& out, const KTeam& X) {
  for (const auto& v : X.schema().vars()) out << v << '\t';
  out << "#weight\n";
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (Val v : X.row(i)) out << X.format_val(v) << '\t';
    out << X.semiring().format(X.weight(i)) << '\n';
  }
}

inline std::string to_tsv(const KTeam& X) {
  std::ostringstream ss;
  write_tsv(ss, X);
  return ss.str();
}

}  // namespace kdep
