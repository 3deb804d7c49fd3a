#pragma once

// Reader for the parenthesised surface syntax of language definitions.
// `[ ]` and `( )` are interchangeable; `;` starts a line comment.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "projed/error.hpp"
#include "projed/term.hpp"

namespace projed {

struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct SExpr {
  using List = std::vector<SExpr>;
  std::variant<Symbol, std::string, std::int64_t, bool, Char, List> value;
  SourcePos pos;

  bool is_symbol() const { return std::holds_alternative<Symbol>(value); }
  bool is_symbol(std::string_view name) const {
    return is_symbol() && std::get<Symbol>(value).name == name;
  }
  bool is_list() const { return std::holds_alternative<List>(value); }
  const std::string& symbol() const { return std::get<Symbol>(value).name; }
  const List& list() const { return std::get<List>(value); }

  // Atom for literal leaves; throws for symbols and lists.
  Atom to_atom() const;
  bool is_literal() const { return !is_symbol() && !is_list(); }

  // Positions are ignored.
  friend bool operator==(const SExpr& a, const SExpr& b) { return a.value == b.value; }
};

std::vector<SExpr> read_sexpr(std::string_view text);
std::string print_sexpr(const SExpr& e);

// Plain data conversion: lists become compounds headed by their first symbol,
// literals become atoms. A compound gets a fresh identity unless written
// `((f part ...) child ...)`, which designates one.
Term sexpr_to_term(const SExpr& e);

}  // namespace projed
