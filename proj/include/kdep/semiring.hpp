#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kdep/error.hpp"
#include "kdep/report.hpp"

namespace kdep {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class SemiringId { Boolean, Naturals, NonNegRationals, Tropical, Viterbi };

inline constexpr std::array<SemiringId, 5> kAllSemirings = {
    SemiringId::Boolean, SemiringId::Naturals, SemiringId::NonNegRationals,
    SemiringId::Tropical, SemiringId::Viterbi};

// Exact semiring element tagged with its semiring. Every carrier is embedded in
// the rationals; Tropical additionally has an explicit infinity.
class Value {
 public:
  Value() = default;

  SemiringId id() const { return id_; }
  bool is_inf() const { return inf_; }
  const Rational& q() const { return q_; }

  friend bool operator==(const Value& a, const Value& b) {
    return a.id_ == b.id_ && a.inf_ == b.inf_ && (a.inf_ || a.q_ == b.q_);
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  // Structural order for use as a container key; unrelated to the semiring order.
  struct KeyLess {
    bool operator()(const Value& a, const Value& b) const {
      if (a.id_ != b.id_) return a.id_ < b.id_;
      if (a.inf_ != b.inf_) return !a.inf_;
      if (a.inf_) return false;
      return a.q_ < b.q_;
    }
  };
  struct Hash {
    std::size_t operator()(const Value& v) const {
      if (v.inf_) return 0x9e3779b97f4a7c15ULL;
      return std::hash<Rational>{}(v.q_) ^ (static_cast<std::size_t>(v.id_) << 1);
    }
  };

 private:
  friend class Semiring;
  Value(SemiringId id, bool inf, Rational q) : id_(id), inf_(inf), q_(std::move(q)) {}

  SemiringId id_ = SemiringId::Boolean;
  bool inf_ = false;
  Rational q_ = 0;
};

struct Flags {
  bool positive = true;
  bool commutative_mul = true;
  bool additively_cancellative = false;
  bool multiplicatively_cancellative = true;
  bool idempotent = false;
  bool totally_zero_min_ordered = true;
  bool has_idempotent_nonzero = false;
  bool has_absorbing_pair = false;

  std::vector<std::pair<std::string, bool>> list() const {
    return {{"positive", positive},
            {"commutative_mul", commutative_mul},
            {"additively_cancellative", additively_cancellative},
            {"multiplicatively_cancellative", multiplicatively_cancellative},
            {"idempotent", idempotent},
            {"totally_zero_min_ordered", totally_zero_min_ordered},
            {"has_idempotent_nonzero", has_idempotent_nonzero},
            {"has_absorbing_pair", has_absorbing_pair}};
  }
};

class Semiring {
 public:
  SemiringId id;
  std::string name;
  Flags flags;
  std::vector<Value> pool;

  static const Semiring& get(SemiringId id) {
    static const std::array<Semiring, 5> all = {
        Semiring(SemiringId::Boolean), Semiring(SemiringId::Naturals),
        Semiring(SemiringId::NonNegRationals), Semiring(SemiringId::Tropical),
        Semiring(SemiringId::Viterbi)};
    return all[static_cast<std::size_t>(id)];
  }
  static const Semiring& boolean() { return get(SemiringId::Boolean); }
  static const Semiring& naturals() { return get(SemiringId::Naturals); }
  static const Semiring& nnrationals() { return get(SemiringId::NonNegRationals); }
  static const Semiring& tropical() { return get(SemiringId::Tropical); }
  static const Semiring& viterbi() { return get(SemiringId::Viterbi); }

  // Names used in problem files and on the command line.
  static const Semiring& by_name(std::string_view n) {
    for (auto id : kAllSemirings)
      if (get(id).name == n) return get(id);
    throw TypeError("unknown semiring '" + std::string(n) +
                    "' (expected natural|boolean|nnrational|tropical|viterbi)");
  }

  bool operator==(const Semiring& o) const { return id == o.id; }
  bool operator!=(const Semiring& o) const { return id != o.id; }

  Value zero() const { return id == SemiringId::Tropical ? Value(id, true, 0) : Value(id, false, 0); }
  Value one() const { return id == SemiringId::Tropical ? Value(id, false, 0) : Value(id, false, 1); }
  Value infinity() const {
    if (id != SemiringId::Tropical) throw TypeError(name + " has no infinity");
    return Value(id, true, 0);
  }

  bool contains(const Rational& q) const {
    switch (id) {
      case SemiringId::Boolean: return q == 0 || q == 1;
      case SemiringId::Naturals: return q >= 0 && denominator(q) == 1;
      case SemiringId::NonNegRationals: return q >= 0;
      case SemiringId::Tropical: return true;
      case SemiringId::Viterbi: return q >= 0 && q <= 1;
    }
    return false;
  }

  Value make(const Rational& q) const {
    if (!contains(q)) throw TypeError(q.str() + " is not an element of " + name);
    return Value(id, false, q);
  }
  Value make(long long n) const { return make(Rational(n)); }
  Value make(long long p, long long d) const { return make(Rational(p, d)); }

  bool is_zero(const Value& a) const { return a == zero(); }

  Value add(const Value& a, const Value& b) const {
    check(a), check(b);
    switch (id) {
      case SemiringId::Boolean:
      case SemiringId::Viterbi: return a.q_ < b.q_ ? b : a;
      case SemiringId::Naturals:
      case SemiringId::NonNegRationals: return Value(id, false, a.q_ + b.q_);
      case SemiringId::Tropical:
        if (a.inf_) return b;
        if (b.inf_) return a;
        return a.q_ < b.q_ ? a : b;
    }
    return a;
  }

  Value mul(const Value& a, const Value& b) const {
    check(a), check(b);
    switch (id) {
      case SemiringId::Boolean: return a.q_ < b.q_ ? a : b;
      case SemiringId::Naturals:
      case SemiringId::NonNegRationals:
      case SemiringId::Viterbi: return Value(id, false, a.q_ * b.q_);
      case SemiringId::Tropical:
        if (a.inf_ || b.inf_) return zero();
        return Value(id, false, a.q_ + b.q_);
    }
    return a;
  }

  // Total zero-min order. Tropical uses the dual of the extended reals, so
  // infinity (the additive identity) is the least element.
  bool leq(const Value& a, const Value& b) const {
    check(a), check(b);
    if (id == SemiringId::Tropical) {
      if (a.inf_) return true;
      if (b.inf_) return false;
      return b.q_ <= a.q_;
    }
    return a.q_ <= b.q_;
  }
  bool lt(const Value& a, const Value& b) const { return leq(a, b) && a != b; }

  Value sum(const std::vector<Value>& vs) const {
    Value acc = zero();
    for (const auto& v : vs) acc = add(acc, v);
    return acc;
  }

  Value parse(std::string_view text) const {
    std::string t(text);
    t.erase(0, t.find_first_not_of(" \t\r\n"));
    t.erase(t.find_last_not_of(" \t\r\n") + 1);
    if (t == "inf" || t == "∞") {
      if (id != SemiringId::Tropical) throw TypeError("'inf' is only a tropical literal");
      return zero();
    }
    if (id == SemiringId::Boolean && t != "0" && t != "1")
      throw TypeError("boolean literal must be 0 or 1, got '" + t + "'");
    if (id == SemiringId::Naturals && t.find('/') != std::string::npos)
      throw TypeError("natural literal must be decimal digits, got '" + t + "'");
    return make(parse_rational(t));
  }

  std::string format(const Value& v) const {
    check(v);
    if (v.inf_) return "inf";
    if (denominator(v.q_) == 1) return numerator(v.q_).str();
    return numerator(v.q_).str() + "/" + denominator(v.q_).str();
  }

  // A nonzero a with a + a = a, preferring one(K).
  std::optional<Value> idempotent_nonzero() const {
    if (add(one(), one()) == one()) return one();
    for (const auto& a : pool)
      if (!is_zero(a) && add(a, a) == a) return a;
    return std::nullopt;
  }

  // Nonzero a, b with a + b = a. The largest pool element is tried first and a
  // strictly smaller partner is preferred over b = a.
  std::optional<std::pair<Value, Value>> absorbing_pair() const {
    std::vector<Value> desc;
    for (const auto& v : pool)
      if (!is_zero(v)) desc.push_back(v);
    std::sort(desc.begin(), desc.end(), [&](const Value& x, const Value& y) { return lt(y, x); });
    for (int strict = 1; strict >= 0; --strict)
      for (const auto& a : desc)
        for (const auto& b : desc)
          if ((strict ? lt(b, a) : b == a) && add(a, b) == a) return std::make_pair(a, b);
    return std::nullopt;
  }

  static Rational parse_rational(const std::string& t) {
    auto slash = t.find('/');
    auto digits = [&](const std::string& s, bool allow_sign) {
      if (s.empty()) return false;
      std::size_t i = (allow_sign && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
      if (i == s.size()) return false;
      for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
      return true;
    };
    std::string num = t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false)) throw TypeError("malformed number literal '" + t + "'");
    BigInt n(num[0] == '+' ? num.substr(1) : num), d(den);
    if (d == 0) throw TypeError("zero denominator in '" + t + "'");
    return Rational(n, d);
  }

 private:
  explicit Semiring(SemiringId i) : id(i) {
    switch (i) {
      case SemiringId::Boolean:
        name = "boolean";
        flags.idempotent = flags.has_idempotent_nonzero = flags.has_absorbing_pair = true;
        pool = {make(0), make(1)};
        break;
      case SemiringId::Naturals:
        name = "natural";
        flags.additively_cancellative = true;
        pool = {make(0), make(1), make(2), make(3), make(5)};
        break;
      case SemiringId::NonNegRationals:
        name = "nnrational";
        flags.additively_cancellative = true;
        pool = {make(0), make(1, 2), make(1), make(3, 2), make(3)};
        break;
      case SemiringId::Tropical:
        name = "tropical";
        flags.idempotent = flags.has_idempotent_nonzero = flags.has_absorbing_pair = true;
        pool = {zero(), make(0), make(1), make(2), make(5)};
        break;
      case SemiringId::Viterbi:
        name = "viterbi";
        flags.idempotent = flags.has_idempotent_nonzero = flags.has_absorbing_pair = true;
        pool = {make(0), make(1, 4), make(1, 2), make(1)};
        break;
    }
  }

  void check(const Value& v) const {
    if (v.id_ != id) throw TypeError("value belongs to " + get(v.id_).name + ", expected " + name);
  }
};

inline Value add(const Semiring& K, const Value& a, const Value& b) { return K.add(a, b); }
inline Value mul(const Semiring& K, const Value& a, const Value& b) { return K.mul(a, b); }
inline bool leq(const Semiring& K, const Value& a, const Value& b) { return K.leq(a, b); }
inline Value sum(const Semiring& K, const std::vector<Value>& vs) { return K.sum(vs); }

// Exhaustive law and flag check over the pool. Each law searches for a
// counterexample and records the first one found.
inline LawReport check_axioms(const Semiring& K) {
  LawReport rep;
  rep.subject = K.name;
  const auto& P = K.pool;
  auto f = [&](const Value& v) { return K.format(v); };
  auto w1 = [&](const Value& a) { return "a=" + f(a); };
  auto w2 = [&](const Value& a, const Value& b) { return "a=" + f(a) + ", b=" + f(b); };
  auto w3 = [&](const Value& a, const Value& b, const Value& c) {
    return "a=" + f(a) + ", b=" + f(b) + ", c=" + f(c);
  };
  auto law3 = [&](const std::string& name, std::optional<bool> declared,
                  const std::function<bool(const Value&, const Value&, const Value&)>& ok) {
    LawCheck lc{name, true, declared, ""};
    for (const auto& a : P)
      for (const auto& b : P)
        for (const auto& c : P)
          if (lc.holds && !ok(a, b, c)) lc.holds = false, lc.witness = w3(a, b, c);
    rep.checks.push_back(lc);
  };
  auto law2 = [&](const std::string& name, std::optional<bool> declared,
                  const std::function<bool(const Value&, const Value&)>& ok) {
    LawCheck lc{name, true, declared, ""};
    for (const auto& a : P)
      for (const auto& b : P)
        if (lc.holds && !ok(a, b)) lc.holds = false, lc.witness = w2(a, b);
    rep.checks.push_back(lc);
  };
  auto law1 = [&](const std::string& name, std::optional<bool> declared,
                  const std::function<bool(const Value&)>& ok) {
    LawCheck lc{name, true, declared, ""};
    for (const auto& a : P)
      if (lc.holds && !ok(a)) lc.holds = false, lc.witness = w1(a);
    rep.checks.push_back(lc);
  };
  const Value z = K.zero(), o = K.one();
  auto add = [&](const Value& a, const Value& b) { return K.add(a, b); };
  auto mul = [&](const Value& a, const Value& b) { return K.mul(a, b); };
  auto leq = [&](const Value& a, const Value& b) { return K.leq(a, b); };
  auto lt = [&](const Value& a, const Value& b) { return K.lt(a, b); };

  law3("add associative", {}, [&](auto& a, auto& b, auto& c) { return add(add(a, b), c) == add(a, add(b, c)); });
  law2("add commutative", {}, [&](auto& a, auto& b) { return add(a, b) == add(b, a); });
  law1("add identity", {}, [&](auto& a) { return add(a, z) == a && add(z, a) == a; });
  law3("mul associative", {}, [&](auto& a, auto& b, auto& c) { return mul(mul(a, b), c) == mul(a, mul(b, c)); });
  law1("mul identity", {}, [&](auto& a) { return mul(a, o) == a && mul(o, a) == a; });
  law3("left distributive", {}, [&](auto& a, auto& b, auto& c) { return mul(a, add(b, c)) == add(mul(a, b), mul(a, c)); });
  law3("right distributive", {}, [&](auto& a, auto& b, auto& c) { return mul(add(a, b), c) == add(mul(a, c), mul(b, c)); });
  law1("annihilation", {}, [&](auto& a) { return mul(a, z) == z && mul(z, a) == z; });
  law1("nontrivial", {}, [&](auto&) { return z != o; });

  law2("positive", K.flags.positive, [&](auto& a, auto& b) {
    bool sum_ok = add(a, b) != z || (a == z && b == z);
    bool prod_ok = mul(a, b) != z || a == z || b == z;
    return sum_ok && prod_ok;
  });
  law2("commutative_mul", K.flags.commutative_mul, [&](auto& a, auto& b) { return mul(a, b) == mul(b, a); });
  // The condition is symmetric in b and c, so only c < b is searched; this
  // reports Boolean's failure as a=1, b=1, c=0.
  law3("additively_cancellative", K.flags.additively_cancellative, [&](auto& a, auto& b, auto& c) {
    return !lt(c, b) || add(a, b) != add(a, c);
  });
  law3("multiplicatively_cancellative", K.flags.multiplicatively_cancellative, [&](auto& a, auto& b, auto& c) {
    if (a == z || b == c) return true;
    return mul(a, b) != mul(a, c) && mul(b, a) != mul(c, a);
  });
  law1("idempotent", K.flags.idempotent, [&](auto& a) { return add(a, a) == a; });

  {
    LawCheck lc{"totally_zero_min_ordered", true, K.flags.totally_zero_min_ordered, ""};
    auto fail = [&](const std::string& why) {
      if (lc.holds) lc.holds = false, lc.witness = why;
    };
    for (const auto& a : P) {
      if (!leq(z, a)) fail("zero not minimal: " + w1(a));
      if (leq(a, z) && a != z) fail("a <= 0 with a != 0: " + w1(a));
      for (const auto& b : P) {
        if (!leq(a, b) && !leq(b, a)) fail("incomparable: " + w2(a, b));
        if (leq(a, b) && leq(b, a) && a != b) fail("not antisymmetric: " + w2(a, b));
        for (const auto& c : P) {
          if (leq(a, b) && leq(b, c) && !leq(a, c)) fail("not transitive: " + w3(a, b, c));
          if (leq(a, b) && !leq(add(a, c), add(b, c))) fail("+ not monotone: " + w3(a, b, c));
          if (leq(a, b) && (!leq(mul(a, c), mul(b, c)) || !leq(mul(c, a), mul(c, b))))
            fail("x not monotone: " + w3(a, b, c));
        }
      }
    }
    rep.checks.push_back(lc);
  }
  {
    LawCheck lc{"has_idempotent_nonzero", false, K.flags.has_idempotent_nonzero, ""};
    for (const auto& a : P)
      if (!lc.holds && a != z && add(a, a) == a) lc.holds = true, lc.witness = w1(a);
    rep.checks.push_back(lc);
  }
  {
    LawCheck lc{"has_absorbing_pair", false, K.flags.has_absorbing_pair, ""};
    if (auto ab = K.absorbing_pair()) lc.holds = true, lc.witness = w2(ab->first, ab->second);
    rep.checks.push_back(lc);
  }
  if (K.flags.additively_cancellative) {
    LawCheck lc{"strict additive monotonicity", true, {}, ""};
    for (const auto& a : P)
      for (const auto& b : P)
        for (const auto& c : P)
          for (const auto& d : P)
            if (lc.holds && lt(a, b) && leq(c, d) && !lt(add(a, c), add(b, d)))
              lc.holds = false, lc.witness = w3(a, b, c) + ", d=" + f(d);
    rep.checks.push_back(lc);
  }
  return rep;
}

}  // namespace kdep
