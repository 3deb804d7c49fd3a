#pragma once

// Rule application: pre-order, rules in source order, first hit wins, then
// start again from the root until nothing matches or fuel runs out.

#include <cstddef>
#include <optional>
#include <vector>

#include "projed/langdef.hpp"
#include "projed/term.hpp"

namespace projed {

inline constexpr std::size_t kDefaultFuel = 100000;

struct Fuel {
  std::size_t max_steps = kDefaultFuel;
};

enum class RewriteStatus { Converged, FuelExhausted };

struct RewriteOutcome {
  Term result;
  std::size_t steps_used = 0;
  RewriteStatus status = RewriteStatus::Converged;
};

struct RuleHit {
  Term result;          // whole tree after the replacement
  std::size_t rule = 0;
  Path path;
};

class FuelExhaustedError : public Error {
 public:
  FuelExhaustedError(const std::string& what, Term last) : Error(what), last_(std::move(last)) {}
  const Term& last() const { return last_; }

 private:
  Term last_;
};

// Eval errors raised by a rule body are rethrown as EvalError prefixed with the
// rule index, its source line and the path of the rewritten subtree.
std::optional<RuleHit> find_and_apply(const std::vector<Rule>& rules, const Term& t,
                                      const LanguageDef& def);
std::optional<Term> apply_rules_once(const std::vector<Rule>& rules, const Term& t,
                                     const LanguageDef& def);
RewriteOutcome rewrite_fixpoint(const std::vector<Rule>& rules, const Term& t, Fuel fuel,
                                const LanguageDef& def);

RewriteOutcome transform(const LanguageDef& def, const Term& t, Fuel fuel = {});
// Throws NotNormalForm when the result is not displayable and
// FuelExhaustedError when the rules do not settle.
Term reduce(const LanguageDef& def, const Term& t, Fuel fuel = {});

}  // namespace projed
