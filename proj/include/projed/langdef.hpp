#pragma once

// Language definitions: abstract-syntax clauses, locals, transform and reduce
// rules, read from `(deflang ...)` forms.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "projed/error.hpp"
#include "projed/sexpr.hpp"
#include "projed/term.hpp"

namespace projed {

// ---------------------------------------------------------------------------
// Abstract-syntax grammar

struct GElement {
  enum class Kind { ClauseRef, StrLeaf, Node, Star, Or };
  Kind kind = Kind::StrLeaf;
  std::string name;  // clause name for ClauseRef, functor for Node
  std::vector<GElement> elements;
};

struct AbstractClause {
  std::string name;
  GElement body;
  SourcePos pos;
};

// ---------------------------------------------------------------------------
// Patterns and expressions share one node shape:
//   Var, Wildcard (patterns only), Literal, Compound (with optional identity
//   sub-sequence), Segment/Splice (`x ...`), Case (expressions only).

struct Rule;

struct Pattern {
  enum class Kind { Var, Wildcard, Literal, Comp, Segment };
  Kind kind = Kind::Wildcard;
  std::string name;                 // Var name or Comp functor
  std::optional<Atom> literal;
  bool has_id = false;              // ((f id-pattern ...) child ...)
  std::vector<Pattern> id_parts;
  std::vector<Pattern> children;    // Comp children; Segment holds exactly one
  SourcePos pos;
};

struct Expr {
  enum class Kind { Var, Literal, Construct, Splice, Case };
  Kind kind = Kind::Literal;
  std::string name;                 // Var name or Construct functor
  std::optional<Atom> literal;
  bool has_id = false;
  std::vector<Expr> id_parts;
  std::vector<Expr> children;       // Construct args; Splice/Case subject is children[0]
  std::vector<Rule> rules;          // Case arms
  SourcePos pos;
};

struct Rule {
  Pattern pattern;
  Expr body;
  SourcePos pos;
};

struct LocalDef {
  std::string name;
  bool is_function = false;
  std::vector<Pattern> params;
  Expr body;
  SourcePos pos;
};

struct LanguageDef {
  std::string name;
  std::vector<AbstractClause> clauses;
  std::vector<LocalDef> locals;
  std::vector<Rule> transform_rules;
  std::vector<Rule> reduce_rules;

  const AbstractClause* find_clause(std::string_view clause) const;
  const LocalDef* find_local(std::string_view local) const;
};

struct Diagnostic {
  std::string message;
  SourcePos pos;
};

// Pattern/expression readers are exposed for tests and the CLI.
Pattern parse_pattern(const SExpr& e);
Expr parse_expr(const SExpr& e);
Rule parse_rule(const SExpr& e);

LanguageDef parse_language(const SExpr& form);
// Reads the text and parses its single deflang form.
LanguageDef parse_language_text(std::string_view text);
std::vector<Diagnostic> validate_language(const LanguageDef& def);

// Builds the starting tree for a clause. Repetitions yield a trailing Repeat
// hole, alternatives a Choice hole, `str` leaves a Text hole.
Term instantiate_clause(const LanguageDef& def, std::string_view clause);

// Grammar element a hole was generated from.
const GElement& resolve_hole_ref(const LanguageDef& def, const HoleRef& ref);

// A user-selectable form at a hole: the menu label and the grammar element
// to instantiate when chosen.
struct HoleForm {
  std::string label;
  const GElement* element = nullptr;
  HoleRef ref;
};
// Alternatives of a Choice/Repeat position. Or-bodies and references to
// Or-clauses are flattened; labels are the functor, the clause name for a
// reference, or "str". A repetition of several elements yields one "add" form.
std::vector<HoleForm> hole_forms(const LanguageDef& def, const HoleRef& ref);
// One term per element the form contributes (several only for multi-element
// repetitions).
std::vector<Term> instantiate_form(const LanguageDef& def, const HoleForm& form);

}  // namespace projed
