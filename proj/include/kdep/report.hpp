#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kdep {

// One checked law. `declared` is set when the law mirrors a declared flag; the
// entry then passes when the observed truth value agrees with the declaration.
struct LawCheck {
  std::string law;
  bool holds = true;
  std::optional<bool> declared;
  std::string witness;

  bool pass() const { return declared ? holds == *declared : holds; }
};

struct LawReport {
  std::string subject;
  std::vector<LawCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
  const LawCheck* find(const std::string& law) const {
    for (const auto& c : checks)
      if (c.law == law) return &c;
    return nullptr;
  }
};

}  // namespace kdep
