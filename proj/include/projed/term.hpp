#pragma once

// Identity-bearing syntax trees. A Term is an immutable value: an atom, a
// compound node (functor + identity + children) or a hole standing for a
// choice the user has not made yet. Copies share structure.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "projed/error.hpp"

namespace projed {

struct Char {
  char32_t value = 0;
  auto operator<=>(const Char&) const = default;
};

class Atom {
 public:
  using Value = std::variant<std::string, std::int64_t, bool, Char>;

  Atom(std::string s) : value_(std::move(s)) {}
  Atom(const char* s) : value_(std::string(s)) {}
  Atom(std::int64_t i) : value_(i) {}
  Atom(int i) : value_(static_cast<std::int64_t>(i)) {}
  Atom(bool b) : value_(b) {}
  Atom(Char c) : value_(c) {}

  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_char() const { return std::holds_alternative<Char>(value_); }

  const std::string& as_string() const { return std::get<std::string>(value_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }
  Char as_char() const { return std::get<Char>(value_); }
  const Value& value() const { return value_; }

  // Text shown when the atom is displayed: strings verbatim, ints in decimal,
  // booleans as true/false, characters as themselves.
  std::string display_text() const;
  // Literal syntax as written in language files: "a", 7, #t, #\x.
  std::string literal() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom& a, const Atom& b) { return a.value_ <=> b.value_; }

 private:
  Value value_;
};

class Identity {
 public:
  explicit Identity(std::vector<Atom> parts);
  Identity(std::initializer_list<Atom> parts) : Identity(std::vector<Atom>(parts)) {}

  const std::vector<Atom>& parts() const { return parts_; }
  std::string to_string() const;

  friend bool operator==(const Identity&, const Identity&) = default;
  friend auto operator<=>(const Identity& a, const Identity& b) { return a.parts_ <=> b.parts_; }

 private:
  std::vector<Atom> parts_;
};

// A process-wide, thread-safe counter backs engine-coined identities.
Identity fresh_identity();
// Ensures every later fresh identity is greater than `value`.
void advance_identity_counter_past(std::int64_t value);

// While alive, fresh identities on this thread are ("~", 1), ("~", 2), ...
// Reduction uses it so the concrete tree, and so the scene, depends only on
// the abstract tree.
class DisplayCoinage {
 public:
  DisplayCoinage();
  ~DisplayCoinage();
  DisplayCoinage(const DisplayCoinage&) = delete;
  DisplayCoinage& operator=(const DisplayCoinage&) = delete;

 private:
  std::optional<std::int64_t> saved_;
};

enum class HoleKind { Choice, Repeat, Text };

std::string_view to_string(HoleKind kind);
std::optional<HoleKind> hole_kind_from_string(std::string_view s);

// Points at the grammar element a hole was generated from: the clause name plus
// the child-index path inside that clause's body. Text holes coined by rules
// have an empty clause.
struct HoleRef {
  std::string clause;
  std::vector<int> path;

  std::string to_string() const;
  static std::optional<HoleRef> parse(std::string_view s);
  friend bool operator==(const HoleRef&, const HoleRef&) = default;
};

class Term;

struct Compound {
  std::string functor;
  Identity id;
  std::vector<Term> children;
};

struct Hole {
  Identity id;
  HoleKind kind = HoleKind::Choice;
  HoleRef ref;
  std::string text;     // current value of a Text hole
  bool shown = false;   // already consumed by a `((hole i) h)` rule
};

class Term {
 public:
  Term(Atom atom) : node_(std::move(atom)) {}
  Term(Compound c) : node_(std::make_shared<const Compound>(std::move(c))) {}
  Term(Hole h) : node_(std::make_shared<const Hole>(std::move(h))) {}

  bool is_atom() const { return std::holds_alternative<Atom>(node_); }
  bool is_compound() const { return std::holds_alternative<CompoundPtr>(node_); }
  bool is_hole() const { return std::holds_alternative<HolePtr>(node_); }

  const Atom& atom() const { return std::get<Atom>(node_); }
  const Compound& compound() const { return *std::get<CompoundPtr>(node_); }
  const Hole& hole() const { return *std::get<HolePtr>(node_); }

  // Compounds and holes carry an identity; atoms do not.
  const Identity* identity() const;
  // Empty for atoms and holes.
  const std::vector<Term>& children() const;
  // Functor of a compound, "hole" for holes, empty for atoms.
  std::string_view functor() const;

  bool is_compound(std::string_view functor) const {
    return is_compound() && compound().functor == functor;
  }
  bool is_string() const { return is_atom() && atom().is_string(); }

  // True when both refer to the same shared node (cheap pointer identity).
  bool same_node(const Term& other) const;

 private:
  using CompoundPtr = std::shared_ptr<const Compound>;
  using HolePtr = std::shared_ptr<const Hole>;
  std::variant<Atom, CompoundPtr, HolePtr> node_;
};

using Path = std::vector<std::size_t>;

Term make_compound(std::string functor, std::optional<Identity> id, std::vector<Term> children);
Term make_hole(HoleKind kind, HoleRef ref, std::string text = {});

// Identity-blind equality. Text holes compare by their current text; other
// holes by kind, grammar reference and shown flag.
bool structurally_equal(const Term& a, const Term& b);
// Structural equality that also requires every identity to match.
bool identical(const Term& a, const Term& b);

struct Located {
  Term term;
  Path path;
};
std::optional<Located> find_by_identity(const Term& root, const Identity& id);

// Returns the subtree at `path`; throws CorruptCacheError when invalid.
const Term& subterm_at(const Term& root, const Path& path);
Term replace_at_path(const Term& root, const Path& path, Term replacement);
Term with_children(const Term& compound, std::vector<Term> children);

// Identity <-> term reification used by events and identity patterns:
// one part becomes the bare atom, several become (list a1 a2 ...).
Term reify_identity(const Identity& id);
std::optional<Identity> identity_from_term(const Term& t);

std::string to_sexpr(const Term& t, bool with_ids = false);
std::string to_sexpr(const Identity& id);

std::string utf8_encode(char32_t cp);
std::u32string utf8_decode(std::string_view s);

}  // namespace projed
