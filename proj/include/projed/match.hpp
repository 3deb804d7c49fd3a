#pragma once

// Pattern matching over terms and evaluation of rule expressions.
//
// Segments (`p ...`) are matched by backtracking over every split of a child
// sequence, earlier segments taking shorter runs first. The first complete
// match of the whole pattern wins; the rule body is never re-entered.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "projed/langdef.hpp"
#include "projed/term.hpp"

namespace projed {

class Binding {
 public:
  static Binding single(Term t) { return Binding(std::move(t)); }
  static Binding multi(std::vector<Binding> items, int depth) {
    return Binding(std::move(items), depth);
  }

  int depth() const { return depth_; }
  bool is_single() const { return depth_ == 0; }
  const Term& term() const { return std::get<Term>(value_); }
  const std::vector<Binding>& items() const { return std::get<std::vector<Binding>>(value_); }

 private:
  explicit Binding(Term t) : value_(std::move(t)), depth_(0) {}
  Binding(std::vector<Binding> items, int depth) : value_(std::move(items)), depth_(depth) {}

  std::variant<Term, std::vector<Binding>> value_;
  int depth_;
};

bool bindings_equal(const Binding& a, const Binding& b);

using Env = std::map<std::string, Binding>;

struct MatchFailure {
  enum class Reason { Functor, Arity, Literal, NonLinear, NoSplit, Identity, Depth };
  Reason reason = Reason::Functor;
  SourcePos pattern_pos;
  std::optional<Term> term;
};

std::string_view to_string(MatchFailure::Reason reason);

std::optional<Env> match_pattern(const Pattern& p, const Term& t, const Env& env = {});
// Same search; on failure reports the last mismatch seen.
std::variant<Env, MatchFailure> match_pattern_explained(const Pattern& p, const Term& t,
                                                        const Env& env = {});
// Matches a parameter list (segments allowed) against an argument list.
std::optional<Env> match_sequence(const std::vector<Pattern>& patterns,
                                  const std::vector<Term>& terms, const Env& env = {});

// Half-open [begin, end) child range per shape element.
struct Run {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const Run&, const Run&) = default;
};
using Split = std::vector<Run>;

// `shape[i]` is true for an ellipsis segment, false for a single fixed
// element. Visits candidate splits in leftmost-shortest order until `visit`
// returns true; returns whether it stopped early.
bool for_each_split(std::size_t children, const std::vector<bool>& shape,
                    const std::function<bool(const Split&)>& visit);
std::vector<Split> enumerate_splits(std::size_t children, const std::vector<bool>& shape);

Term eval_expr(const Expr& e, const Env& env, const LanguageDef& def);
Term eval_case(const Term& subject, const std::vector<Rule>& rules, const Env& env,
               const LanguageDef& def);
// Locals are scoped over the whole language: the body sees only its parameters.
Term apply_local(const LanguageDef& def, const std::string& name, const std::vector<Term>& args);

}  // namespace projed
