#include "projed/match.hpp"

#include <algorithm>
#include <set>

namespace projed {

bool bindings_equal(const Binding& a, const Binding& b) {
  if (a.depth() != b.depth()) return false;
  if (a.is_single()) return structurally_equal(a.term(), b.term());
  const auto& xs = a.items();
  const auto& ys = b.items();
  if (xs.size() != ys.size()) return false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!bindings_equal(xs[i], ys[i])) return false;
  }
  return true;
}

std::string_view to_string(MatchFailure::Reason reason) {
  switch (reason) {
    case MatchFailure::Reason::Functor: return "functor mismatch";
    case MatchFailure::Reason::Arity: return "arity";
    case MatchFailure::Reason::Literal: return "literal";
    case MatchFailure::Reason::NonLinear: return "nonlinear-inequality";
    case MatchFailure::Reason::NoSplit: return "no-split";
    case MatchFailure::Reason::Identity: return "identity";
    case MatchFailure::Reason::Depth: return "depth";
  }
  return "unknown";
}

namespace {

using Cont = std::function<bool(const Env&)>;

void pattern_var_depths(const Pattern& p, int depth, std::map<std::string, int>& out) {
  if (p.kind == Pattern::Kind::Var) out.emplace(p.name, depth);
  int inner = p.kind == Pattern::Kind::Segment ? depth + 1 : depth;
  for (const auto& sub : p.id_parts) pattern_var_depths(sub, inner, out);
  for (const auto& sub : p.children) pattern_var_depths(sub, inner, out);
}

std::size_t fixed_count(const std::vector<Pattern>& pats, std::size_t from) {
  return static_cast<std::size_t>(std::count_if(pats.begin() + static_cast<std::ptrdiff_t>(from),
                                                pats.end(), [](const Pattern& p) {
                                                  return p.kind != Pattern::Kind::Segment;
                                                }));
}

class Matcher {
 public:
  bool match(const Pattern& p, const Term& t, const Env& env, const Cont& k) {
    switch (p.kind) {
      case Pattern::Kind::Wildcard:
        return k(env);
      case Pattern::Kind::Var:
        return bind(p, t, env, k);
      case Pattern::Kind::Literal:
        if (literal_matches(*p.literal, t)) return k(env);
        return fail(MatchFailure::Reason::Literal, p, t);
      case Pattern::Kind::Comp:
        return match_compound(p, t, env, k);
      case Pattern::Kind::Segment:
        return fail(MatchFailure::Reason::NoSplit, p, t);
    }
    return false;
  }

  bool match_seq(const std::vector<Pattern>& pats, std::size_t pi, const std::vector<Term>& kids,
                 std::size_t ki, const Env& env, const Cont& k) {
    if (pi == pats.size()) {
      if (ki == kids.size()) return k(env);
      if (!kids.empty()) return fail(MatchFailure::Reason::Arity, pats.empty() ? nullptr : &pats.back(), kids[ki]);
      return false;
    }
    const Pattern& p = pats[pi];
    if (p.kind != Pattern::Kind::Segment) {
      if (ki >= kids.size()) {
        failure_ = MatchFailure{MatchFailure::Reason::Arity, p.pos, std::nullopt};
        return false;
      }
      return match(p, kids[ki], env,
                   [&](const Env& e) { return match_seq(pats, pi + 1, kids, ki + 1, e, k); });
    }
    std::size_t needed = fixed_count(pats, pi + 1);
    if (kids.size() < ki + needed) {
      failure_ = MatchFailure{MatchFailure::Reason::NoSplit, p.pos, std::nullopt};
      return false;
    }
    std::size_t max_len = kids.size() - ki - needed;
    for (std::size_t len = 0; len <= max_len; ++len) {
      if (match_run(p, kids, ki, ki + len, env, [&](const Env& e) {
            return match_seq(pats, pi + 1, kids, ki + len, e, k);
          })) {
        return true;
      }
    }
    return false;
  }

  std::optional<MatchFailure> failure_;

 private:
  bool fail(MatchFailure::Reason reason, const Pattern* p, const Term& t) {
    failure_ = MatchFailure{reason, p ? p->pos : SourcePos{}, t};
    return false;
  }
  bool fail(MatchFailure::Reason reason, const Pattern& p, const Term& t) { return fail(reason, &p, t); }

  static bool literal_matches(const Atom& lit, const Term& t) {
    if (t.is_atom()) return t.atom() == lit;
    return lit.is_string() && t.is_hole() && t.hole().kind == HoleKind::Text &&
           t.hole().text == lit.as_string();
  }

  bool bind(const Pattern& p, const Term& t, const Env& env, const Cont& k) {
    auto it = env.find(p.name);
    if (it == env.end()) {
      Env next = env;
      next.emplace(p.name, Binding::single(t));
      return k(next);
    }
    if (!it->second.is_single()) return fail(MatchFailure::Reason::Depth, p, t);
    if (!structurally_equal(it->second.term(), t)) return fail(MatchFailure::Reason::NonLinear, p, t);
    return k(env);
  }

  bool match_compound(const Pattern& p, const Term& t, const Env& env, const Cont& k) {
    if (t.is_hole()) {
      if (p.name != "hole" || t.hole().shown) return fail(MatchFailure::Reason::Functor, p, t);
      Hole shown = t.hole();
      shown.shown = true;
      std::vector<Term> view{Term(std::move(shown))};
      return match_identity_then_children(p, *t.identity(), view, env, k);
    }
    if (!t.is_compound() || t.compound().functor != p.name) {
      return fail(MatchFailure::Reason::Functor, p, t);
    }
    return match_identity_then_children(p, t.compound().id, t.compound().children, env, k);
  }

  bool match_identity_then_children(const Pattern& p, const Identity& id,
                                    const std::vector<Term>& kids, const Env& env, const Cont& k) {
    auto children = [&](const Env& e) { return match_seq(p.children, 0, kids, 0, e, k); };
    if (!p.has_id) return children(env);
    std::vector<Term> parts(id.parts().begin(), id.parts().end());
    if (match_seq(p.id_parts, 0, parts, 0, env, children)) return true;
    if (p.id_parts.size() == 1 && parts.size() > 1) {
      return match(p.id_parts.front(), reify_identity(id), env, children);
    }
    return false;
  }

  // Matches kids[from, to) one by one against the segment's element pattern
  // and binds every variable introduced inside it at one more ellipsis depth.
  bool match_run(const Pattern& seg, const std::vector<Term>& kids, std::size_t from,
                 std::size_t to, const Env& outer, const Cont& k) {
    const Pattern& elem = seg.children.front();
    std::map<std::string, int> depths;
    pattern_var_depths(elem, 0, depths);
    std::vector<std::string> fresh;
    for (const auto& [name, d] : depths) {
      if (!outer.count(name)) fresh.push_back(name);
    }
    std::vector<Env> per_element;
    std::function<bool(std::size_t)> step = [&](std::size_t i) -> bool {
      if (i == to) {
        Env next = outer;
        for (const auto& name : fresh) {
          std::vector<Binding> items;
          items.reserve(per_element.size());
          for (const auto& e : per_element) items.push_back(e.at(name));
          next.emplace(name, Binding::multi(std::move(items), depths.at(name) + 1));
        }
        return k(next);
      }
      return match(elem, kids[i], outer, [&](const Env& e) {
        per_element.push_back(e);
        bool ok = step(i + 1);
        per_element.pop_back();
        return ok;
      });
    };
    return step(from);
  }
};

}  // namespace

std::optional<Env> match_pattern(const Pattern& p, const Term& t, const Env& env) {
  auto r = match_pattern_explained(p, t, env);
  if (auto* e = std::get_if<Env>(&r)) return std::move(*e);
  return std::nullopt;
}

std::variant<Env, MatchFailure> match_pattern_explained(const Pattern& p, const Term& t,
                                                        const Env& env) {
  Matcher m;
  std::optional<Env> result;
  m.match(p, t, env, [&](const Env& e) {
    result = e;
    return true;
  });
  if (result) return std::move(*result);
  return m.failure_.value_or(MatchFailure{MatchFailure::Reason::Functor, p.pos, t});
}

std::optional<Env> match_sequence(const std::vector<Pattern>& patterns,
                                  const std::vector<Term>& terms, const Env& env) {
  Matcher m;
  std::optional<Env> result;
  m.match_seq(patterns, 0, terms, 0, env, [&](const Env& e) {
    result = e;
    return true;
  });
  return result;
}

// ---------------------------------------------------------------------------
// Split enumeration

namespace {

bool splits_from(std::size_t children, const std::vector<bool>& shape, std::size_t si,
                 std::size_t ci, Split& acc, const std::function<bool(const Split&)>& visit) {
  if (si == shape.size()) return ci == children && visit(acc);
  std::size_t needed = static_cast<std::size_t>(
      std::count(shape.begin() + static_cast<std::ptrdiff_t>(si) + 1, shape.end(), false));
  if (!shape[si]) {
    if (ci >= children) return false;
    acc.push_back({ci, ci + 1});
    bool stop = splits_from(children, shape, si + 1, ci + 1, acc, visit);
    acc.pop_back();
    return stop;
  }
  if (children < ci + needed) return false;
  for (std::size_t len = 0; len <= children - ci - needed; ++len) {
    acc.push_back({ci, ci + len});
    bool stop = splits_from(children, shape, si + 1, ci + len, acc, visit);
    acc.pop_back();
    if (stop) return true;
  }
  return false;
}

}  // namespace

bool for_each_split(std::size_t children, const std::vector<bool>& shape,
                    const std::function<bool(const Split&)>& visit) {
  Split acc;
  return splits_from(children, shape, 0, 0, acc, visit);
}

std::vector<Split> enumerate_splits(std::size_t children, const std::vector<bool>& shape) {
  std::vector<Split> out;
  for_each_split(children, shape, [&](const Split& s) {
    out.push_back(s);
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

constexpr int kMaxLocalDepth = 2000;

void expr_var_depths(const Expr& e, int depth, std::map<std::string, int>& out) {
  if (e.kind == Expr::Kind::Var) {
    auto [it, inserted] = out.emplace(e.name, depth);
    if (!inserted) it->second = std::min(it->second, depth);
    return;
  }
  int inner = e.kind == Expr::Kind::Splice ? depth + 1 : depth;
  for (const auto& sub : e.id_parts) expr_var_depths(sub, inner, out);
  for (const auto& sub : e.children) expr_var_depths(sub, inner, out);
  for (const auto& r : e.rules) expr_var_depths(r.body, inner, out);
}

std::string describe(const Term& t) {
  if (t.is_compound()) return "(" + t.compound().functor + " ...)";
  return to_sexpr(t);
}

class Evaluator {
 public:
  explicit Evaluator(const LanguageDef& def) : def_(def) {}

  Term eval(const Expr& e, const Env& env) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return Term(*e.literal);
      case Expr::Kind::Var:
        return variable(e, env);
      case Expr::Kind::Construct:
        return construct(e, env);
      case Expr::Kind::Case:
        return eval_case(eval(e.children.front(), env), e.rules, env);
      case Expr::Kind::Splice:
        throw EvalError(at(e) + "'...' used outside a sequence");
    }
    throw EvalError("bad expression");
  }

  std::vector<Term> eval_seq(const std::vector<Expr>& xs, const Env& env) {
    std::vector<Term> out;
    for (const auto& x : xs) {
      if (x.kind == Expr::Kind::Splice) {
        auto part = splice(x.children.front(), env);
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
      } else {
        out.push_back(eval(x, env));
      }
    }
    return out;
  }

  Term eval_case(const Term& subject, const std::vector<Rule>& rules, const Env& env) {
    for (const auto& r : rules) {
      if (auto m = match_pattern(r.pattern, subject, env)) return eval(r.body, *m);
    }
    throw EvalError("case exhausted: no arm matches " + describe(subject));
  }

  Term call_local(const LocalDef& local, const std::vector<Term>& args) {
    if (++depth_ > kMaxLocalDepth) {
      throw EvalError("local '" + local.name + "' recursed deeper than " +
                      std::to_string(kMaxLocalDepth));
    }
    struct Guard {
      int& d;
      ~Guard() { --d; }
    } guard{depth_};
    bool has_segment = std::any_of(local.params.begin(), local.params.end(),
                                   [](const Pattern& p) { return p.kind == Pattern::Kind::Segment; });
    if (!has_segment && local.params.size() != args.size()) {
      throw EvalError("local '" + local.name + "' expects " + std::to_string(local.params.size()) +
                      " argument(s), given " + std::to_string(args.size()));
    }
    auto env = match_sequence(local.params, args);
    if (!env) throw EvalError("arguments do not match the parameters of local '" + local.name + "'");
    return eval(local.body, *env);
  }

 private:
  static std::string at(const Expr& e) {
    return std::to_string(e.pos.line) + ":" + std::to_string(e.pos.column) + ": ";
  }

  Term variable(const Expr& e, const Env& env) {
    if (auto it = env.find(e.name); it != env.end()) {
      if (!it->second.is_single()) {
        throw EvalError(at(e) + "variable '" + e.name + "' has ellipsis depth " +
                        std::to_string(it->second.depth()) + " and must be followed by '...'");
      }
      return it->second.term();
    }
    if (const LocalDef* local = def_.find_local(e.name)) {
      if (local->is_function) throw EvalError(at(e) + "local function '" + e.name + "' used as a value");
      return eval(local->body, Env{});
    }
    if (e.name == "str") return make_hole(HoleKind::Text, HoleRef{});
    throw EvalError(at(e) + "unbound variable '" + e.name + "'");
  }

  Term construct(const Expr& e, const Env& env) {
    if (!e.has_id) {
      if (const LocalDef* local = def_.find_local(e.name); local && local->is_function) {
        return call_local(*local, eval_seq(e.children, env));
      }
    }
    std::vector<Term> args = eval_seq(e.children, env);
    if (!e.has_id) {
      if (auto n = arithmetic(e.name, args)) return Term(Atom(*n));
    }
    std::optional<Identity> id;
    if (e.has_id) {
      std::vector<Atom> parts;
      for (const auto& part : eval_seq(e.id_parts, env)) {
        if (!part.is_atom()) {
          throw EvalError(at(e) + "identity designator of '" + e.name +
                          "' must evaluate to atoms, got " + describe(part));
        }
        parts.push_back(part.atom());
      }
      id = Identity(std::move(parts));
    }
    return make_compound(e.name, std::move(id), std::move(args));
  }

  // Integer arithmetic for (+ a b ...), (- a b ...), (* a b ...). Zero-argument
  // (+) and (-) stay constructions: they are font-size markers.
  static std::optional<std::int64_t> arithmetic(const std::string& op, const std::vector<Term>& args) {
    if (args.empty() || (op != "+" && op != "-" && op != "*")) return std::nullopt;
    for (const auto& a : args) {
      if (!a.is_atom() || !a.atom().is_int()) return std::nullopt;
    }
    std::int64_t acc = args.front().atom().as_int();
    if (args.size() == 1) return op == "-" ? -acc : acc;
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::int64_t v = args[i].atom().as_int();
      acc = op == "+" ? acc + v : op == "-" ? acc - v : acc * v;
    }
    return acc;
  }

  std::vector<Term> splice(const Expr& inner, const Env& env) {
    std::map<std::string, int> occurrences;
    expr_var_depths(inner, 0, occurrences);
    std::vector<std::pair<std::string, const Binding*>> driving;
    for (const auto& [name, occ_depth] : occurrences) {
      auto it = env.find(name);
      if (it != env.end() && it->second.depth() > occ_depth) driving.emplace_back(name, &it->second);
    }
    if (driving.empty()) {
      throw EvalError(at(inner) + "'...' follows an expression with no repeated variable");
    }
    std::size_t n = driving.front().second->items().size();
    for (const auto& [name, b] : driving) {
      if (b->items().size() != n) {
        throw EvalError(at(inner) + "variables under '...' have different lengths: '" +
                        driving.front().first + "' has " + std::to_string(n) + ", '" + name +
                        "' has " + std::to_string(b->items().size()));
      }
    }
    std::vector<Term> out;
    for (std::size_t i = 0; i < n; ++i) {
      Env local = env;
      for (const auto& [name, b] : driving) local.insert_or_assign(name, b->items()[i]);
      if (inner.kind == Expr::Kind::Splice) {
        auto part = splice(inner.children.front(), local);
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
      } else {
        out.push_back(eval(inner, local));
      }
    }
    return out;
  }

  const LanguageDef& def_;
  int depth_ = 0;
};

}  // namespace

Term eval_expr(const Expr& e, const Env& env, const LanguageDef& def) {
  return Evaluator(def).eval(e, env);
}

Term eval_case(const Term& subject, const std::vector<Rule>& rules, const Env& env,
               const LanguageDef& def) {
  return Evaluator(def).eval_case(subject, rules, env);
}

Term apply_local(const LanguageDef& def, const std::string& name, const std::vector<Term>& args) {
  const LocalDef* local = def.find_local(name);
  if (!local || !local->is_function) throw EvalError("no local function '" + name + "'");
  return Evaluator(def).call_local(*local, args);
}

}  // namespace projed
