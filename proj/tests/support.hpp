#pragma once

// Shared helpers for the test binaries: corpus access, term/pattern
// readers, and seeded generators for property tests.

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "projed/langdef.hpp"
#include "projed/match.hpp"
#include "projed/persist.hpp"
#include "projed/sexpr.hpp"
#include "projed/term.hpp"

namespace testing {

using namespace projed;

inline std::filesystem::path corpus_path(const std::string& rel) {
  return std::filesystem::path(PROJED_CORPUS_DIR) / rel;
}

inline std::shared_ptr<const LanguageDef> corpus_language(const std::string& file) {
  return std::make_shared<const LanguageDef>(load_language_file(corpus_path(file)));
}

inline SExpr read_one(std::string_view text) {
  auto forms = read_sexpr(text);
  if (forms.size() != 1) throw Error("expected one form in: " + std::string(text));
  return forms.front();
}

inline Term T(std::string_view text) { return sexpr_to_term(read_one(text)); }
inline Pattern P(std::string_view text) { return parse_pattern(read_one(text)); }
inline Expr E(std::string_view text) { return parse_expr(read_one(text)); }

inline Term corpus_term(const std::string& rel) { return T(read_file(corpus_path(rel))); }

// Identity-blind text of a term, written independently of the library
// printers so it can serve as an equality oracle.
inline std::string shape(const Term& t) {
  if (t.is_atom()) {
    const Atom& a = t.atom();
    if (a.is_string()) return "s:" + std::to_string(a.as_string().size()) + ":" + a.as_string();
    if (a.is_int()) return "i:" + std::to_string(a.as_int());
    if (a.is_bool()) return a.as_bool() ? "b:1" : "b:0";
    return "c:" + std::to_string(static_cast<std::uint32_t>(a.as_char().value));
  }
  if (t.is_hole()) {
    const Hole& h = t.hole();
    if (h.kind == HoleKind::Text) return "H[text:" + std::to_string(h.text.size()) + ":" + h.text + "]";
    return std::string("H[") + std::string(to_string(h.kind)) + ":" + h.ref.to_string() +
           (h.shown ? ":shown" : "") + "]";
  }
  std::string out = "(" + t.compound().functor;
  for (const auto& k : t.children()) out += " " + shape(k);
  return out + ")";
}

// Same, with every identity written out.
inline std::string shape_with_ids(const Term& t) {
  auto ids = [](const Identity& id) {
    std::string out;
    for (const auto& p : id.parts()) out += "|" + shape(Term(p));
    return out;
  };
  if (t.is_atom()) return shape(t);
  if (t.is_hole()) return shape(t) + "#" + ids(t.hole().id);
  std::string out = "(" + t.compound().functor + "#" + ids(t.compound().id);
  for (const auto& k : t.children()) out += " " + shape_with_ids(k);
  return out + ")";
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }
  bool chance(int percent) { return below(100) < percent; }
  template <class C>
  const auto& pick(const C& c) { return c[static_cast<std::size_t>(below(static_cast<int>(c.size())))]; }

  std::string text(int max_len) {
    static const std::vector<std::string> pieces = {
        "a", "b", "z", "Q", "0", "7", " ", ",", "%", "#", "'", "<", ">", "&", "\"", "\n", "\t",
        "é", "λ", "●", "x y", "%2C", "-1"};
    std::string out;
    int n = below(max_len + 1);
    for (int i = 0; i < n; ++i) out += pick(pieces);
    return out;
  }

  Atom atom() {
    switch (below(4)) {
      case 0: return Atom(text(6));
      case 1: return Atom(static_cast<std::int64_t>(below(2001)) - 1000);
      case 2: return Atom(chance(50));
      default: {
        static const std::vector<char32_t> chars = {U'a', U'Z', U'#', U',', U' ', U'λ', U'\\', U'%'};
        return Atom(Char{pick(chars)});
      }
    }
  }

  Identity identity() {
    if (chance(70)) return fresh_identity();
    std::vector<Atom> parts;
    int n = 1 + below(3);
    for (int i = 0; i < n; ++i) parts.push_back(atom());
    return Identity(std::move(parts));
  }

  Term term(int depth, bool holes = true) {
    int roll = below(10);
    if (depth <= 0 || roll < 3) {
      if (holes && roll == 0) {
        static const std::vector<HoleKind> kinds = {HoleKind::Choice, HoleKind::Repeat, HoleKind::Text};
        HoleKind kind = pick(kinds);
        HoleRef ref{kind == HoleKind::Text && chance(50) ? "" : "clause", {}};
        for (int i = below(3); i > 0; --i) ref.path.push_back(below(4));
        return Term(Hole{identity(), kind, ref, kind == HoleKind::Text ? text(5) : "", chance(30)});
      }
      return Term(atom());
    }
    static const std::vector<std::string> functors = {"f", "g", "node", "seq", "a-b", "x->y", "λ"};
    std::vector<Term> kids;
    int n = below(5);
    for (int i = 0; i < n; ++i) kids.push_back(term(depth - 1, holes));
    return Term(Compound{pick(functors), identity(), std::move(kids)});
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace testing
