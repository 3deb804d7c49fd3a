#include "projed/langdef.hpp"

#include <algorithm>
#include <set>

namespace projed {

namespace {

constexpr std::string_view kEllipsis = "...";

const SExpr::List& expect_list(const SExpr& e, const char* what) {
  if (!e.is_list()) throw ParseError(std::string("expected ") + what, e.pos);
  return e.list();
}

const std::string& expect_symbol(const SExpr& e, const char* what) {
  if (!e.is_symbol()) throw ParseError(std::string("expected ") + what, e.pos);
  return e.symbol();
}

// ---------------------------------------------------------------------------
// Grammar

GElement parse_gelement(const SExpr& e) {
  if (e.is_symbol()) {
    if (e.symbol() == "str") return GElement{GElement::Kind::StrLeaf, "str", {}};
    return GElement{GElement::Kind::ClauseRef, e.symbol(), {}};
  }
  const auto& items = expect_list(e, "grammar element");
  if (items.empty()) throw ParseError("empty grammar element", e.pos);
  const std::string& head = expect_symbol(items.front(), "functor, '*' or 'or'");
  GElement g;
  if (head == "*") {
    g.kind = GElement::Kind::Star;
  } else if (head == "or") {
    g.kind = GElement::Kind::Or;
  } else {
    g.kind = GElement::Kind::Node;
    g.name = head;
  }
  for (std::size_t i = 1; i < items.size(); ++i) g.elements.push_back(parse_gelement(items[i]));
  if ((g.kind == GElement::Kind::Star || g.kind == GElement::Kind::Or) && g.elements.empty()) {
    throw ParseError("'" + head + "' needs at least one element", e.pos);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Patterns

template <typename Node, typename ParseOne>
std::vector<Node> parse_sequence(const SExpr::List& items, std::size_t from, ParseOne parse_one,
                                 typename Node::Kind segment_kind) {
  std::vector<Node> out;
  for (std::size_t i = from; i < items.size(); ++i) {
    if (items[i].is_symbol(kEllipsis)) {
      if (out.empty()) throw ParseError("'...' must follow an element", items[i].pos);
      Node seg;
      seg.kind = segment_kind;
      seg.pos = out.back().pos;
      seg.children.push_back(std::move(out.back()));
      out.back() = std::move(seg);
      continue;
    }
    out.push_back(parse_one(items[i]));
  }
  return out;
}

}  // namespace

Pattern parse_pattern(const SExpr& e) {
  Pattern p;
  p.pos = e.pos;
  if (e.is_symbol()) {
    if (e.symbol() == kEllipsis) throw ParseError("misplaced '...'", e.pos);
    if (e.symbol() == "_") {
      p.kind = Pattern::Kind::Wildcard;
    } else {
      p.kind = Pattern::Kind::Var;
      p.name = e.symbol();
    }
    return p;
  }
  if (e.is_literal()) {
    p.kind = Pattern::Kind::Literal;
    p.literal = e.to_atom();
    return p;
  }
  const auto& items = e.list();
  if (items.empty()) throw ParseError("empty pattern", e.pos);
  p.kind = Pattern::Kind::Comp;
  const SExpr& head = items.front();
  if (head.is_list()) {
    const auto& id_items = head.list();
    if (id_items.size() < 2) throw ParseError("identity pattern needs a functor and parts", head.pos);
    p.name = expect_symbol(id_items.front(), "functor");
    p.has_id = true;
    p.id_parts = parse_sequence<Pattern>(id_items, 1, parse_pattern, Pattern::Kind::Segment);
  } else {
    p.name = expect_symbol(head, "functor");
    if (p.name == kEllipsis) throw ParseError("'...' cannot head a pattern", head.pos);
  }
  p.children = parse_sequence<Pattern>(items, 1, parse_pattern, Pattern::Kind::Segment);
  return p;
}

Expr parse_expr(const SExpr& e) {
  Expr x;
  x.pos = e.pos;
  if (e.is_symbol()) {
    if (e.symbol() == kEllipsis) throw ParseError("misplaced '...'", e.pos);
    if (e.symbol() == "_") throw ParseError("'_' cannot be used in an expression", e.pos);
    x.kind = Expr::Kind::Var;
    x.name = e.symbol();
    return x;
  }
  if (e.is_literal()) {
    x.kind = Expr::Kind::Literal;
    x.literal = e.to_atom();
    return x;
  }
  const auto& items = e.list();
  if (items.empty()) throw ParseError("empty expression", e.pos);
  const SExpr& head = items.front();
  if (head.is_symbol("case")) {
    if (items.size() < 2) throw ParseError("case needs a subject", e.pos);
    x.kind = Expr::Kind::Case;
    x.children.push_back(parse_expr(items[1]));
    for (std::size_t i = 2; i < items.size(); ++i) x.rules.push_back(parse_rule(items[i]));
    return x;
  }
  x.kind = Expr::Kind::Construct;
  if (head.is_list()) {
    const auto& id_items = head.list();
    if (id_items.size() < 2) throw ParseError("identity designator needs a functor and parts", head.pos);
    x.name = expect_symbol(id_items.front(), "functor");
    x.has_id = true;
    x.id_parts = parse_sequence<Expr>(id_items, 1, parse_expr, Expr::Kind::Splice);
  } else {
    x.name = expect_symbol(head, "functor");
    if (x.name == kEllipsis) throw ParseError("'...' cannot head an expression", head.pos);
  }
  x.children = parse_sequence<Expr>(items, 1, parse_expr, Expr::Kind::Splice);
  return x;
}

Rule parse_rule(const SExpr& e) {
  const auto& items = expect_list(e, "rule [pattern expression]");
  if (items.size() != 2) throw ParseError("rule must have exactly a pattern and an expression", e.pos);
  return Rule{parse_pattern(items[0]), parse_expr(items[1]), e.pos};
}

namespace {

LocalDef parse_local(const SExpr& e) {
  const auto& items = expect_list(e, "local definition");
  if (items.size() != 2) throw ParseError("local must be [name exp] or [(name pattern ...) exp]", e.pos);
  LocalDef local;
  local.pos = e.pos;
  if (items[0].is_symbol()) {
    local.name = items[0].symbol();
  } else {
    const auto& head = expect_list(items[0], "local name or (name pattern ...)");
    if (head.empty()) throw ParseError("empty local head", items[0].pos);
    local.name = expect_symbol(head.front(), "local name");
    local.is_function = true;
    local.params = parse_sequence<Pattern>(head, 1, parse_pattern, Pattern::Kind::Segment);
  }
  local.body = parse_expr(items[1]);
  return local;
}

}  // namespace

const AbstractClause* LanguageDef::find_clause(std::string_view clause) const {
  for (const auto& c : clauses) {
    if (c.name == clause) return &c;
  }
  return nullptr;
}

const LocalDef* LanguageDef::find_local(std::string_view local) const {
  for (const auto& l : locals) {
    if (l.name == local) return &l;
  }
  return nullptr;
}

LanguageDef parse_language(const SExpr& form) {
  const auto& items = expect_list(form, "(deflang ...)");
  if (items.size() < 2 || !items[0].is_symbol("deflang")) {
    throw ParseError("expected (deflang name ...)", form.pos);
  }
  LanguageDef def;
  def.name = expect_symbol(items[1], "language name");
  std::set<std::string> seen;
  for (std::size_t i = 2; i < items.size(); ++i) {
    const auto& section = expect_list(items[i], "deflang section");
    if (section.empty()) throw ParseError("empty deflang section", items[i].pos);
    const std::string& keyword = expect_symbol(section.front(), "section keyword");
    if (!seen.insert(keyword).second) {
      throw ParseError("duplicate section '" + keyword + "'", items[i].pos);
    }
    if (keyword == "abstract") {
      for (std::size_t k = 1; k < section.size(); ++k) {
        const auto& entry = expect_list(section[k], "[name g-element]");
        if (entry.size() != 2) {
          throw ParseError("abstract clause must be [name g-element]", section[k].pos);
        }
        def.clauses.push_back(AbstractClause{expect_symbol(entry[0], "clause name"),
                                             parse_gelement(entry[1]), section[k].pos});
      }
    } else if (keyword == "locals") {
      for (std::size_t k = 1; k < section.size(); ++k) def.locals.push_back(parse_local(section[k]));
    } else if (keyword == "transform" || keyword == "reduce") {
      auto& rules = keyword == "transform" ? def.transform_rules : def.reduce_rules;
      for (std::size_t k = 1; k < section.size(); ++k) rules.push_back(parse_rule(section[k]));
    } else {
      throw ParseError("unknown deflang section '" + keyword + "'", items[i].pos);
    }
  }
  return def;
}

LanguageDef parse_language_text(std::string_view text) {
  auto forms = read_sexpr(text);
  if (forms.size() != 1) {
    throw ParseError("expected exactly one deflang form, found " + std::to_string(forms.size()),
                     forms.empty() ? SourcePos{1, 1} : forms[1].pos);
  }
  return parse_language(forms.front());
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  explicit Validator(const LanguageDef& def) : def_(def) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> names;
    for (const auto& c : def_.clauses) {
      if (!names.insert(c.name).second) report("duplicate clause '" + c.name + "'", c.pos);
    }
    for (const auto& c : def_.clauses) check_gelement(c.body, c);
    std::set<std::string> locals;
    for (const auto& l : def_.locals) {
      if (!locals.insert(l.name).second) report("duplicate local '" + l.name + "'", l.pos);
    }
    for (const auto& l : def_.locals) {
      std::set<std::string> bound;
      for (const auto& p : l.params) collect_vars(p, bound);
      check_expr(l.body, bound);
    }
    for (const auto* rules : {&def_.transform_rules, &def_.reduce_rules}) {
      for (const auto& r : *rules) check_rule(r, {});
    }
    return std::move(out_);
  }

 private:
  void report(std::string message, SourcePos pos) { out_.push_back({std::move(message), pos}); }

  void check_gelement(const GElement& g, const AbstractClause& owner) {
    if (g.kind == GElement::Kind::ClauseRef && !def_.find_clause(g.name)) {
      report("clause '" + owner.name + "' references undefined clause '" + g.name + "'", owner.pos);
    }
    for (const auto& sub : g.elements) check_gelement(sub, owner);
  }

  static void collect_vars(const Pattern& p, std::set<std::string>& out) {
    if (p.kind == Pattern::Kind::Var) out.insert(p.name);
    for (const auto& sub : p.id_parts) collect_vars(sub, out);
    for (const auto& sub : p.children) collect_vars(sub, out);
  }

  void check_rule(const Rule& r, std::set<std::string> bound) {
    collect_vars(r.pattern, bound);
    check_expr(r.body, bound);
  }

  void check_expr(const Expr& x, const std::set<std::string>& bound) {
    switch (x.kind) {
      case Expr::Kind::Var:
        if (!bound.count(x.name) && x.name != "str") {
          const LocalDef* local = def_.find_local(x.name);
          if (!local) {
            report("unbound variable '" + x.name + "'", x.pos);
          } else if (local->is_function) {
            report("local function '" + x.name + "' used as a value", x.pos);
          }
        }
        return;
      case Expr::Kind::Literal:
        return;
      case Expr::Kind::Construct:
        if (const LocalDef* local = def_.find_local(x.name); local && local->is_function &&
                                                              !x.has_id) {
          bool spliced = std::any_of(x.children.begin(), x.children.end(),
                                     [](const Expr& c) { return c.kind == Expr::Kind::Splice; });
          if (!spliced && x.children.size() != local->params.size() &&
              std::none_of(local->params.begin(), local->params.end(), [](const Pattern& p) {
                return p.kind == Pattern::Kind::Segment;
              })) {
            report("local '" + x.name + "' expects " + std::to_string(local->params.size()) +
                       " argument(s), given " + std::to_string(x.children.size()),
                   x.pos);
          }
        }
        for (const auto& sub : x.id_parts) check_expr(sub, bound);
        for (const auto& sub : x.children) check_expr(sub, bound);
        return;
      case Expr::Kind::Splice:
        check_expr(x.children.front(), bound);
        return;
      case Expr::Kind::Case:
        check_expr(x.children.front(), bound);
        for (const auto& r : x.rules) check_rule(r, bound);
        return;
    }
  }

  const LanguageDef& def_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate_language(const LanguageDef& def) { return Validator(def).run(); }

// ---------------------------------------------------------------------------
// Instantiation

namespace {

class Instantiator {
 public:
  explicit Instantiator(const LanguageDef& def) : def_(def) {}

  Term clause(const std::string& name) {
    const AbstractClause* c = def_.find_clause(name);
    if (!c) throw LanguageError("unknown clause '" + name + "'");
    if (std::find(stack_.begin(), stack_.end(), name) != stack_.end()) {
      throw LanguageError("clause '" + name +
                          "' is not instantiable: it recurses without a repetition or alternative");
    }
    stack_.push_back(name);
    Term t = element(c->body, HoleRef{name, {}});
    stack_.pop_back();
    return t;
  }

  Term element(const GElement& g, const HoleRef& at) {
    switch (g.kind) {
      case GElement::Kind::ClauseRef:
        return clause(g.name);
      case GElement::Kind::StrLeaf:
        return make_hole(HoleKind::Text, at);
      case GElement::Kind::Or:
        return make_hole(HoleKind::Choice, at);
      case GElement::Kind::Star:
        return make_hole(HoleKind::Repeat, at);
      case GElement::Kind::Node: {
        std::vector<Term> kids;
        for (std::size_t i = 0; i < g.elements.size(); ++i) {
          HoleRef sub = at;
          sub.path.push_back(static_cast<int>(i));
          kids.push_back(element(g.elements[i], sub));
        }
        return make_compound(g.name, std::nullopt, std::move(kids));
      }
    }
    throw LanguageError("bad grammar element");
  }

 private:
  const LanguageDef& def_;
  std::vector<std::string> stack_;
};

void flatten_forms(const LanguageDef& def, const GElement& g, const HoleRef& at,
                   std::set<std::string>& visiting, std::vector<HoleForm>& out) {
  if (g.kind == GElement::Kind::Or) {
    for (std::size_t i = 0; i < g.elements.size(); ++i) {
      HoleRef sub = at;
      sub.path.push_back(static_cast<int>(i));
      flatten_forms(def, g.elements[i], sub, visiting, out);
    }
    return;
  }
  if (g.kind == GElement::Kind::ClauseRef) {
    const AbstractClause* c = def.find_clause(g.name);
    if (c && c->body.kind == GElement::Kind::Or && visiting.insert(c->name).second) {
      flatten_forms(def, c->body, HoleRef{c->name, {}}, visiting, out);
      visiting.erase(c->name);
      return;
    }
    out.push_back(HoleForm{g.name, &g, at});
    return;
  }
  std::string label = g.kind == GElement::Kind::Node      ? g.name
                      : g.kind == GElement::Kind::StrLeaf ? "str"
                                                          : "add";
  out.push_back(HoleForm{label, &g, at});
}

}  // namespace

Term instantiate_clause(const LanguageDef& def, std::string_view clause) {
  return Instantiator(def).clause(std::string(clause));
}

const GElement& resolve_hole_ref(const LanguageDef& def, const HoleRef& ref) {
  const AbstractClause* c = def.find_clause(ref.clause);
  if (!c) throw LanguageError("hole refers to unknown clause '" + ref.clause + "'");
  const GElement* g = &c->body;
  for (int step : ref.path) {
    if (step < 0 || static_cast<std::size_t>(step) >= g->elements.size()) {
      throw LanguageError("hole reference " + ref.to_string() + " does not address the grammar");
    }
    g = &g->elements[static_cast<std::size_t>(step)];
  }
  return *g;
}

std::vector<HoleForm> hole_forms(const LanguageDef& def, const HoleRef& ref) {
  const GElement& g = resolve_hole_ref(def, ref);
  std::vector<HoleForm> out;
  std::set<std::string> visiting;
  if (g.kind == GElement::Kind::Star) {
    if (g.elements.size() == 1) {
      HoleRef sub = ref;
      sub.path.push_back(0);
      flatten_forms(def, g.elements.front(), sub, visiting, out);
    } else {
      out.push_back(HoleForm{"add", &g, ref});
    }
  } else if (g.kind == GElement::Kind::Or) {
    visiting.insert(ref.clause);
    flatten_forms(def, g, ref, visiting, out);
  }
  return out;
}

std::vector<Term> instantiate_form(const LanguageDef& def, const HoleForm& form) {
  Instantiator inst(def);
  if (form.element->kind == GElement::Kind::Star) {
    std::vector<Term> out;
    for (std::size_t i = 0; i < form.element->elements.size(); ++i) {
      HoleRef sub = form.ref;
      sub.path.push_back(static_cast<int>(i));
      out.push_back(inst.element(form.element->elements[i], sub));
    }
    return out;
  }
  return {inst.element(*form.element, form.ref)};
}

}  // namespace projed
