#pragma once

// A direct small-step interpreter for the lambda-with-pairs language, kept
// apart from the rewrite engine so it can check it.

#include <memory>
#include <string>

#include "projed/term.hpp"

namespace testing::lambda {

struct Node;
using L = std::shared_ptr<const Node>;

struct Node {
  enum Kind { Const, Pair, Ident, Apply, Lambda } kind;
  std::string s;  // constant, identifier or bound name
  L a, b;         // pair halves, function/argument, or lambda body in a
};

inline L mk(Node::Kind k, std::string s, L a = nullptr, L b = nullptr) {
  return std::make_shared<const Node>(Node{k, std::move(s), std::move(a), std::move(b)});
}

inline L from_term(const projed::Term& t) {
  std::string f(t.functor());
  const auto& k = t.children();
  auto str = [&](std::size_t i) { return k.at(i).atom().as_string(); };
  if (f == "const") return mk(Node::Const, str(0));
  if (f == "ident") return mk(Node::Ident, str(0));
  if (f == "pair") return mk(Node::Pair, "", from_term(k.at(0)), from_term(k.at(1)));
  if (f == "apply") return mk(Node::Apply, "", from_term(k.at(0)), from_term(k.at(1)));
  if (f == "lambda") return mk(Node::Lambda, str(0), from_term(k.at(1)));
  throw projed::Error("not a lambda term: " + f);
}

inline std::string print(const L& t) {
  switch (t->kind) {
    case Node::Const: return "(const \"" + t->s + "\")";
    case Node::Ident: return "(ident \"" + t->s + "\")";
    case Node::Pair: return "(pair " + print(t->a) + " " + print(t->b) + ")";
    case Node::Apply: return "(apply " + print(t->a) + " " + print(t->b) + ")";
    case Node::Lambda: return "(lambda \"" + t->s + "\" " + print(t->a) + ")";
  }
  return "";
}

inline L subst(const L& repl, const std::string& old, const L& t) {
  switch (t->kind) {
    case Node::Const: return t;
    case Node::Pair: return mk(Node::Pair, "", subst(repl, old, t->a), subst(repl, old, t->b));
    case Node::Ident: return t->s == old ? repl : t;
    case Node::Apply: return mk(Node::Apply, "", subst(repl, old, t->a), subst(repl, old, t->b));
    case Node::Lambda: return t->s == old ? t : mk(Node::Lambda, t->s, subst(repl, old, t->a));
  }
  return t;
}

inline L eval(const L& t) {
  if (t->kind != Node::Apply) return t;
  if (t->a->kind == Node::Lambda) return subst(t->b, t->a->s, t->a->a);
  return mk(Node::Apply, "", eval(t->a), t->b);
}

inline L eval_step(const L& t) {
  if (t->kind == Node::Lambda) return mk(Node::Lambda, t->s, eval_step(t->a));
  if (t->kind == Node::Pair) return mk(Node::Pair, "", eval_step(t->a), eval_step(t->b));
  return eval(t);
}

}  // namespace testing::lambda
