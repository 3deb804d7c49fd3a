#include "projed/session.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace projed {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void cache_walk(const Term& t, Path& path, std::map<Identity, Path>& out) {
  if (const Identity* id = t.identity()) out.emplace(*id, path);
  const auto& kids = t.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    cache_walk(kids[i], path, out);
    path.pop_back();
  }
}

bool contains_functor(const Term& t, std::string_view functor) {
  if (t.is_compound(functor)) return true;
  for (const auto& k : t.children()) {
    if (contains_functor(k, functor)) return true;
  }
  return false;
}

std::string key_text(const Key& k) {
  if (const auto* c = std::get_if<Char>(&k)) return utf8_encode(c->value);
  return std::get<std::string>(k);
}

}  // namespace

std::map<Identity, Path> build_abstract_cache(const Term& root) {
  std::map<Identity, Path> out;
  Path path;
  cache_walk(root, path, out);
  return out;
}

std::string describe(const Event& e) {
  return std::visit(
      overloaded{
          [](const KeyPressed& k) {
            return "key " + (k.selected ? k.selected->to_string() : std::string("-1")) + " " +
                   key_text(k.key);
          },
          [](const DoubleClick& d) { return "dblclick " + d.target.to_string(); },
          [](const NewEdge& n) {
            return "new-edge " + to_sexpr(n.type) + " " + n.source.to_string() + " " +
                   n.target.to_string();
          },
          [](const MenuSelected& m) { return "menu " + m.target.to_string() + " " + m.label; },
          [](const DragNode& d) {
            return "drag " + d.node.to_string() + " " + format_number(d.x) + " " +
                   format_number(d.y);
          },
          [](const EditText& t) { return "edit " + t.target.to_string() + " " + t.text; },
          [](const EdgeDrag& d) {
            return "edge " + d.source.to_string() + " " + d.target.to_string();
          },
      },
      e);
}

Session Session::start(std::shared_ptr<const LanguageDef> def, const std::string& start_clause,
                       SessionOptions options) {
  if (!def->find_clause(start_clause)) {
    throw SessionError("language '" + def->name + "' has no clause '" + start_clause + "'");
  }
  Term t = instantiate_clause(*def, start_clause);
  return resume(std::move(def), start_clause, std::move(t), {}, options);
}

Session Session::resume(std::shared_ptr<const LanguageDef> def, const std::string& start_clause,
                        Term abstract, LayoutCache cache, SessionOptions options) {
  if (!def->find_clause(start_clause)) {
    throw SessionError("language '" + def->name + "' has no clause '" + start_clause + "'");
  }
  Session s;
  s.def_ = std::move(def);
  s.start_clause_ = start_clause;
  s.abstract_ = std::move(abstract);
  s.layout_cache_ = std::move(cache);
  s.options_ = options;
  s.refresh();
  return s;
}

void Session::refresh() {
  abstract_cache_ = build_abstract_cache(abstract_);
  concrete_ = reduce(*def_, abstract_, options_.fuel);
  NF nf = validate_nf(concrete_);
  LayoutOptions lo;
  lo.viewport = options_.viewport;
  lo.hole_menu = [this](const Term& hole) {
    try {
      return hole_options(hole.hole().id);
    } catch (const Error&) {
      return Menu{};
    }
  };
  scene_ = layout(nf, layout_cache_, lo);
  for (const auto& [id, p] : scene_.placements) layout_cache_.positions.insert_or_assign(id, p);
  for (auto& p : scene_.primitives) {
    if (!p.abstract && p.concrete && abstract_cache_.count(*p.concrete)) p.abstract = p.concrete;
  }
}

std::optional<Located> Session::hole_at(const Identity& id) const {
  auto it = abstract_cache_.find(id);
  if (it == abstract_cache_.end()) return std::nullopt;
  const Term& t = subterm_at(abstract_, it->second);
  if (!t.is_hole()) return std::nullopt;
  return Located{t, it->second};
}

namespace {

// Number of children a repetition contributes per step, and whether a
// completed repetition sits right before the hole.
std::pair<std::size_t, bool> repetition_before(const LanguageDef& def, const Path& path,
                                               const Hole& h) {
  const GElement& star = resolve_hole_ref(def, h.ref);
  std::size_t width = std::max<std::size_t>(1, star.elements.size());
  if (path.empty() || h.ref.path.empty()) return {width, false};
  std::size_t index = path.back();
  auto slot = static_cast<std::size_t>(h.ref.path.back());
  return {width, index >= slot + width};
}

}  // namespace

Menu Session::hole_options(const Identity& hole) const {
  auto at = hole_at(hole);
  if (!at) throw SessionError(hole.to_string() + " is not a hole");
  const Hole& h = at->term.hole();
  Menu menu;
  if (h.kind == HoleKind::Text) {
    menu.push_back({"edit", Term(Atom("edit"))});
    return menu;
  }
  for (const auto& form : hole_forms(*def_, h.ref)) {
    menu.push_back({form.label, Term(Atom(form.label))});
  }
  if (h.kind == HoleKind::Repeat && repetition_before(*def_, at->path, h).second) {
    menu.push_back({"delete previous", Term(Atom("delete previous"))});
  }
  return menu;
}

Session Session::expand_hole(const Identity& hole, std::string_view choice) const {
  auto at = hole_at(hole);
  if (!at) throw SessionError(hole.to_string() + " is not a hole");
  const Hole& h = at->term.hole();
  Session next = *this;
  next.diagnostics_.clear();
  next.pending_.reset();
  next.fuel_exhausted_ = false;
  if (h.kind == HoleKind::Text) {
    if (choice != "edit") throw SessionError("'" + std::string(choice) + "' is not an option here");
    return next;
  }
  if (h.kind == HoleKind::Repeat && choice == "delete previous") {
    auto [width, possible] = repetition_before(*def_, at->path, h);
    if (!possible) throw SessionError("nothing to delete before " + hole.to_string());
    Path parent_path(at->path.begin(), at->path.end() - 1);
    const Term& parent = subterm_at(abstract_, parent_path);
    std::vector<Term> kids = parent.children();
    auto end = kids.begin() + static_cast<std::ptrdiff_t>(at->path.back());
    kids.erase(end - static_cast<std::ptrdiff_t>(width), end);
    next.abstract_ = replace_at_path(abstract_, parent_path, with_children(parent, std::move(kids)));
    next.refresh();
    return next;
  }
  auto forms = hole_forms(*def_, h.ref);
  auto form = std::find_if(forms.begin(), forms.end(),
                           [&](const HoleForm& f) { return f.label == choice; });
  if (form == forms.end()) {
    throw SessionError("'" + std::string(choice) + "' is not an option at " + hole.to_string());
  }
  std::vector<Term> made = instantiate_form(*def_, *form);
  if (h.kind == HoleKind::Choice || at->path.empty()) {
    if (made.size() != 1) throw SessionError("a choice must produce exactly one element");
    next.abstract_ = replace_at_path(abstract_, at->path, made.front());
  } else {
    Path parent_path(at->path.begin(), at->path.end() - 1);
    const Term& parent = subterm_at(abstract_, parent_path);
    std::vector<Term> kids = parent.children();
    kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(at->path.back()), made.begin(),
                made.end());
    next.abstract_ = replace_at_path(abstract_, parent_path, with_children(parent, std::move(kids)));
  }
  next.refresh();
  return next;
}

Session Session::edit_string(const Identity& target, const std::string& text) const {
  auto it = abstract_cache_.find(target);
  if (it == abstract_cache_.end()) throw SessionError(target.to_string() + " is not editable");
  const Term& t = subterm_at(abstract_, it->second);
  Term replacement = t;
  if (t.is_hole() && t.hole().kind == HoleKind::Text) {
    Hole h = t.hole();
    h.text = text;
    replacement = Term(std::move(h));
  } else if (t.is_compound()) {
    std::vector<Term> kids = t.children();
    auto s = std::find_if(kids.begin(), kids.end(), [](const Term& k) {
      return k.is_string() || (k.is_hole() && k.hole().kind == HoleKind::Text);
    });
    if (s == kids.end()) throw SessionError(target.to_string() + " holds no text to edit");
    if (s->is_hole()) {
      Hole h = s->hole();
      h.text = text;
      *s = Term(std::move(h));
    } else {
      *s = Term(Atom(text));
    }
    replacement = with_children(t, std::move(kids));
  } else {
    throw SessionError(target.to_string() + " is not editable");
  }
  Session next = *this;
  next.diagnostics_.clear();
  next.pending_.reset();
  next.fuel_exhausted_ = false;
  next.abstract_ = replace_at_path(abstract_, it->second, std::move(replacement));
  next.refresh();
  return next;
}

namespace {

struct NodeRef {
  const GraphNF* graph = nullptr;
  const GraphNode* node = nullptr;
};

std::vector<NodeRef> find_nodes(const Scene& scene, const Identity& id) {
  std::vector<NodeRef> out;
  for (const auto& g : scene.graphs) {
    for (const auto& n : g->nodes) {
      if (n.id == id || n.abstract_id == id) out.push_back({g.get(), &n});
    }
  }
  return out;
}

}  // namespace

std::vector<Term> Session::allowed_edge_types(const Identity& source, const Identity& target) const {
  auto sources = find_nodes(scene_, source);
  auto targets = find_nodes(scene_, target);
  if (sources.empty()) throw SessionError(source.to_string() + " is not a graph node");
  if (targets.empty()) throw SessionError(target.to_string() + " is not a graph node");
  for (const auto& s : sources) {
    for (const auto& t : targets) {
      if (s.graph != t.graph) continue;
      std::vector<Term> out;
      for (const auto& et : s.graph->edge_types) {
        if (structurally_equal(et.source_type, s.node->type) &&
            structurally_equal(et.target_type, t.node->type)) {
          out.push_back(make_compound(et.name, std::nullopt, {}));
        }
      }
      return out;
    }
  }
  throw SessionError(source.to_string() + " and " + target.to_string() + " are in different graphs");
}

std::optional<Identity> Session::abstract_for(const Identity& concrete) const {
  if (abstract_cache_.count(concrete)) return concrete;
  for (const auto& p : scene_.primitives) {
    if (p.concrete == concrete && p.abstract) return p.abstract;
  }
  return std::nullopt;
}

Term Session::event_term(const Event& e) const {
  return std::visit(
      overloaded{
          [&](const KeyPressed& k) {
            Term sel = Term(Atom(-1));
            if (k.selected) sel = reify_identity(abstract_for(*k.selected).value_or(*k.selected));
            Term key = std::holds_alternative<Char>(k.key) ? Term(Atom(std::get<Char>(k.key)))
                                                           : Term(Atom(std::get<std::string>(k.key)));
            return make_compound("key-pressed", std::nullopt, {sel, key});
          },
          [](const DoubleClick& d) {
            return make_compound("double-click", std::nullopt, {reify_identity(d.target)});
          },
          [](const NewEdge& n) {
            return make_compound("new-edge", std::nullopt,
                                 {n.type, reify_identity(n.source), reify_identity(n.target)});
          },
          [&](const MenuSelected& m) -> Term {
            if (m.message) return *m.message;
            for (const auto& p : scene_.primitives) {
              if (p.concrete != m.target) continue;
              for (const auto& entry : p.menu) {
                if (entry.label == m.label) return entry.message;
              }
            }
            throw SessionError("no menu entry '" + m.label + "' on " + m.target.to_string());
          },
          [](const auto&) -> Term { throw SessionError("event is not delivered to the rules"); },
      },
      e);
}

Session Session::with_diagnostic(std::string message, bool fuel) const {
  Session next = *this;
  next.diagnostics_ = {std::move(message)};
  next.fuel_exhausted_ = fuel;
  next.pending_.reset();
  return next;
}

Session Session::run_transform(const Term& event) const {
  Term wrapped = make_compound("send", std::nullopt, {abstract_, event});
  RewriteOutcome out = transform(*def_, wrapped, options_.fuel);
  if (out.status == RewriteStatus::FuelExhausted) {
    return with_diagnostic("transform did not settle within " +
                               std::to_string(options_.fuel.max_steps) + " steps",
                           true);
  }
  Term result = out.result;
  if (result.is_compound("send") && result.children().size() == 2) result = result.children()[0];
  if (contains_functor(result, "send")) {
    return with_diagnostic("an event was left inside the tree; change discarded");
  }
  Session next = *this;
  next.diagnostics_.clear();
  next.pending_.reset();
  next.fuel_exhausted_ = false;
  next.abstract_ = std::move(result);
  next.refresh();
  return next;
}

Session Session::apply_event(const Event& e) const {
  if (const auto* k = std::get_if<KeyPressed>(&e)) {
    if (k->selected) {
      Identity sel = abstract_for(*k->selected).value_or(*k->selected);
      if (auto at = hole_at(sel)) {
        const Hole& h = at->term.hole();
        if (h.kind == HoleKind::Text) {
          if (const auto* c = std::get_if<Char>(&k->key); c && c->value >= 0x20 && c->value != 0x7f) {
            return edit_string(sel, h.text + utf8_encode(c->value));
          }
          if (std::get_if<std::string>(&k->key) && std::get<std::string>(k->key) == "backspace") {
            std::u32string cps = utf8_decode(h.text);
            if (!cps.empty()) cps.pop_back();
            std::string text;
            for (char32_t cp : cps) text += utf8_encode(cp);
            return edit_string(sel, text);
          }
        } else if (const auto* c = std::get_if<Char>(&k->key)) {
          std::vector<std::string> hits;
          for (const auto& entry : hole_options(sel)) {
            std::u32string label = utf8_decode(entry.label);
            if (!label.empty() && label.front() == c->value) hits.push_back(entry.label);
          }
          if (hits.size() == 1) return expand_hole(sel, hits.front());
        }
      }
    }
    return run_transform(event_term(e));
  }
  if (const auto* m = std::get_if<MenuSelected>(&e)) {
    if (hole_at(m->target)) return expand_hole(m->target, m->label);
    return run_transform(event_term(e));
  }
  if (const auto* d = std::get_if<DragNode>(&e)) {
    std::optional<Identity> node;
    for (const auto& ref : find_nodes(scene_, d->node)) {
      if (ref.node->id) {
        node = *ref.node->id;
        break;
      }
    }
    if (!node) throw SessionError("no graph node " + d->node.to_string() + " to drag");
    Session next = *this;
    next.diagnostics_.clear();
    next.fuel_exhausted_ = false;
    next.layout_cache_.positions.insert_or_assign(*node, Point{d->x, d->y});
    next.refresh();
    return next;
  }
  if (const auto* t = std::get_if<EditText>(&e)) {
    return edit_string(abstract_for(t->target).value_or(t->target), t->text);
  }
  if (const auto* g = std::get_if<EdgeDrag>(&e)) {
    auto types = allowed_edge_types(g->source, g->target);
    auto src = find_nodes(scene_, g->source).front().node->abstract_id;
    auto tgt = find_nodes(scene_, g->target).front().node->abstract_id;
    if (!src || !tgt) throw SessionError("graph node without an abstract identity");
    if (types.empty()) {
      Session next = *this;
      next.diagnostics_.clear();
      next.pending_.reset();
      return next;
    }
    if (types.size() == 1) return run_transform(event_term(NewEdge{types.front(), *src, *tgt}));
    Session next = *this;
    next.diagnostics_.clear();
    PendingEdgeChoice pending{*src, *tgt, types, {}};
    for (const auto& t : types) {
      pending.menu.push_back({std::string(t.functor()), t});
    }
    next.pending_ = std::move(pending);
    return next;
  }
  return run_transform(event_term(e));
}

Session Session::dispatch(const Event& e) const {
  try {
    return apply_event(e);
  } catch (const FuelExhaustedError& ex) {
    return with_diagnostic(ex.what(), true);
  } catch (const std::exception& ex) {
    return with_diagnostic(ex.what());
  }
}

Session Session::choose_pending(std::string_view label) const {
  if (!pending_) return with_diagnostic("no edge type choice is pending");
  for (const auto& t : pending_->types) {
    if (t.functor() == label) {
      return dispatch(NewEdge{t, pending_->source, pending_->target});
    }
  }
  return with_diagnostic("'" + std::string(label) + "' is not one of the offered edge types");
}

Session Session::prune_layout_cache() const {
  Session next = *this;
  std::set<Identity> drawn;
  for (const auto& p : scene_.primitives) {
    if (p.concrete) drawn.insert(*p.concrete);
  }
  // Nodes hidden from the current view (inside thumbnails, or dropped by a
  // reduce rule) keep their place as long as the tree node whose identity
  // their own was built from is still there, or the tree still refers to it
  // as data (a dump remembers the entity it opened by its id).
  std::set<Atom> data;
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.is_atom()) data.insert(t.atom());
    for (const auto& k : t.children()) collect(k);
  };
  collect(abstract_);
  auto live = [&](const Identity& id) {
    if (scene_.placements.count(id) || abstract_cache_.count(id) || drawn.count(id)) return true;
    return std::any_of(id.parts().begin(), id.parts().end(), [&](const Atom& part) {
      return abstract_cache_.count(Identity{part}) > 0 || (part.is_int() && data.count(part) > 0);
    });
  };
  std::erase_if(next.layout_cache_.positions, [&](const auto& kv) { return !live(kv.first); });
  std::erase_if(next.layout_cache_.waypoints, [&](const auto& kv) { return !live(kv.first); });
  return next;
}

}  // namespace projed
