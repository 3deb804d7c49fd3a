#include "doctest.h"
#include "projed/script.hpp"
#include "projed/session.hpp"
#include "support.hpp"

using namespace projed;
using testing::corpus_language;
using testing::corpus_term;
using testing::shape;
using testing::T;

namespace {

Session play(Session s, std::string_view script) {
  for (const auto& step : parse_script(script)) {
    if (step.verb == ScriptStep::Verb::Snapshot) continue;
    s = apply_step(s, step);
    INFO(step.line);
    REQUIRE(s.diagnostics().empty());
  }
  return s;
}

Identity at(const Session& s, std::string_view path) { return resolve_script_id(path, s); }

std::vector<std::string> labels(const Menu& m) {
  std::vector<std::string> out;
  for (const auto& e : m) out.push_back(e.label);
  return out;
}

std::size_t holes_in(const Scene& s) {
  std::size_t n = 0;
  for (const auto& p : s.primitives) n += p.kind == Primitive::Kind::Hole;
  return n;
}

}  // namespace

TEST_CASE("starting sessions") {
  Session dna = Session::start(corpus_language("dna.pld"), "DNA");
  REQUIRE(dna.abstract().is_compound("gene"));
  REQUIRE(dna.abstract().children().size() == 1);
  CHECK(dna.abstract().children()[0].is_hole());
  CHECK(holes_in(dna.scene()) == 1);
  CHECK(dna.abstract_cache().size() == 2);

  Session boxes = Session::start(corpus_language("boxes.pld"), "root");
  CHECK(boxes.abstract().children()[0].is_compound("boxes"));
  CHECK(boxes.abstract().children()[1].is_hole());

  CHECK_THROWS_AS(Session::start(corpus_language("dna.pld"), "nope"), SessionError);
}

TEST_CASE("hole menus and expansion") {
  Session s = Session::start(corpus_language("dna.pld"), "DNA");
  Identity hole = at(s, "@0");
  CHECK(labels(s.hole_options(hole)) == std::vector<std::string>{"a", "c", "t", "g"});

  Session one = s.expand_hole(hole, "a");
  CHECK(shape(one.abstract()).rfind("(gene (a) H[repeat:", 0) == 0);
  // the hole keeps its identity and moves right
  CHECK(*one.abstract().children()[1].identity() == hole);
  CHECK(labels(one.hole_options(hole)) ==
        std::vector<std::string>{"a", "c", "t", "g", "delete previous"});

  Session back = one.expand_hole(hole, "delete previous");
  CHECK(shape(back.abstract()) == shape(s.abstract()));

  // the original value is untouched
  CHECK(s.abstract().children().size() == 1);
  CHECK_THROWS(s.expand_hole(hole, "x"));
  CHECK_THROWS(s.expand_hole(*s.abstract().identity(), "a"));
}

TEST_CASE("choice holes offer each alternative") {
  auto def = std::make_shared<const LanguageDef>(parse_language_text(
      "(deflang t (abstract [tree (node (* (or leaf tree)))] [leaf (data str)])"
      " (reduce [((hole _) h) h] [(node c ...) (seq c ...)] [(data s) s]))"));
  Session s = Session::start(def, "tree");
  Identity hole = at(s, "@0");
  CHECK(labels(s.hole_options(hole)) == std::vector<std::string>{"leaf", "tree"});
  Session grown = s.expand_hole(hole, "tree");
  CHECK(shape(grown.abstract().children()[0]).rfind("(node H[repeat:", 0) == 0);
}

TEST_CASE("keys on a selected hole") {
  Session s = Session::start(corpus_language("dna.pld"), "DNA");
  Identity hole = at(s, "@0");
  Session c = s.dispatch(KeyPressed{hole, Char{U'c'}});
  CHECK(c.diagnostics().empty());
  CHECK(c.abstract().children()[0].is_compound("c"));

  // no option starts with z and no rule handles it
  Session z = s.dispatch(KeyPressed{std::nullopt, Char{U'z'}});
  CHECK(z.diagnostics().empty());
  CHECK(identical(z.abstract(), s.abstract()));
  Session z2 = s.dispatch(KeyPressed{hole, Char{U'z'}});
  CHECK(identical(z2.abstract(), s.abstract()));
}

TEST_CASE("menu selection on a hole") {
  Session s = Session::start(corpus_language("dna.pld"), "DNA");
  Session t = s.dispatch(MenuSelected{at(s, "@0"), "t", std::nullopt});
  CHECK(t.abstract().children()[0].is_compound("t"));
  Session bad = s.dispatch(MenuSelected{at(s, "@0"), "nothing", std::nullopt});
  CHECK_FALSE(bad.diagnostics().empty());
  CHECK(identical(bad.abstract(), s.abstract()));
}

TEST_CASE("text editing") {
  Session s = Session::start(corpus_language("class-models.pld"), "model");
  s = play(s, "menu @0.0 class\n");
  Identity name_hole = at(s, "@0.0.1");
  Session named = s.dispatch(EditText{name_hole, "Library"});
  REQUIRE(named.diagnostics().empty());
  bool shown = false;
  for (const auto& p : named.scene().primitives) shown |= p.kind == Primitive::Kind::Text && p.text == "Library";
  CHECK(shown);

  // editing the class edits its first string child
  Identity cls = at(named, "@0.0");
  Session renamed = named.dispatch(EditText{cls, ""});
  REQUIRE(renamed.diagnostics().empty());
  CHECK(renamed.abstract().children()[0].children()[0].children()[1].hole().text.empty());
  Session again = renamed.dispatch(EditText{cls, "Shelf"});
  CHECK(again.diagnostics().empty());

  Session bad = named.dispatch(EditText{*named.abstract().identity(), "x"});
  CHECK_FALSE(bad.diagnostics().empty());
  CHECK(identical(bad.abstract(), named.abstract()));
  CHECK_THROWS(named.edit_string(Identity{Atom("missing")}, "x"));
}

TEST_CASE("text holes take typed keys") {
  Session s = Session::start(corpus_language("class-models.pld"), "model");
  s = play(s, "menu @0.0 class\n");
  Identity h = at(s, "@0.0.1");
  for (char32_t c : {U'A', U'b', U'λ'}) s = s.dispatch(KeyPressed{h, Char{c}});
  s = s.dispatch(KeyPressed{h, std::string("backspace")});
  REQUIRE(s.diagnostics().empty());
  const Term& hole = s.abstract().children()[0].children()[0].children()[1];
  REQUIRE(hole.is_hole());
  CHECK(hole.hole().text == "Ab");
}

TEST_CASE("dragged nodes stay put") {
  Session s = Session::start(corpus_language("nested-graph.pld"), "machine");
  s = play(s, "menu @0.0.0 entity\nmenu @0.0.1 entity\n");
  Identity node = at(s, "n,@0.0.0");
  s = s.dispatch(DragNode{node, 300, 200});
  REQUIRE(s.diagnostics().empty());
  CHECK(s.layout_cache().positions.at(node) == Point{300, 200});
  // an unrelated edit re-lays the scene
  s = play(s, "menu @0.0.2 entity\n");
  s = s.dispatch(KeyPressed{std::nullopt, Char{U'q'}});
  bool found = false;
  for (const auto& p : s.scene().primitives) {
    if (p.kind == Primitive::Kind::Node && p.concrete == node) {
      CHECK(p.box.x == 300);
      CHECK(p.box.y == 200);
      found = true;
    }
  }
  CHECK(found);
  Session missing = s.dispatch(DragNode{Identity{Atom("nowhere")}, 1, 1});
  CHECK_FALSE(missing.diagnostics().empty());
}

TEST_CASE("edge types follow node types") {
  Session s = Session::start(corpus_language("use-cases.pld"), "diagram");
  s = play(s, "menu @0.0 actor\nmenu @1.0 use-case\nmenu @1.1 use-case\n");
  auto types = [&](const char* a, const char* b) {
    std::vector<std::string> out;
    for (const auto& t : s.allowed_edge_types(at(s, a), at(s, b))) out.push_back(std::string(t.functor()));
    return out;
  };
  CHECK(types("n,@0.0", "n,@1.0") == std::vector<std::string>{"uses"});
  CHECK(types("n,@1.0", "n,@1.1") == std::vector<std::string>{"includes", "extends"});
  CHECK(types("n,@1.0", "n,@0.0").empty());

  Session uses = s.dispatch(EdgeDrag{at(s, "n,@0.0"), at(s, "n,@1.0")});
  CHECK(uses.diagnostics().empty());
  CHECK(uses.abstract().children()[2].children().size() == 1);

  Session dropped = s.dispatch(EdgeDrag{at(s, "n,@1.0"), at(s, "n,@0.0")});
  CHECK(identical(dropped.abstract(), s.abstract()));
  CHECK_FALSE(dropped.pending_edge_choice());

  Session pending = s.dispatch(EdgeDrag{at(s, "n,@1.0"), at(s, "n,@1.1")});
  REQUIRE(pending.pending_edge_choice());
  CHECK(labels(pending.pending_edge_choice()->menu) == std::vector<std::string>{"includes", "extends"});
  CHECK(identical(pending.abstract(), s.abstract()));
  Session chosen = pending.choose_pending("extends");
  CHECK_FALSE(chosen.pending_edge_choice());
  const Term& link = chosen.abstract().children()[2].children()[0];
  CHECK(link.children()[0].is_compound("extends"));
  CHECK(pending.choose_pending("bogus").diagnostics().size() == 1);

  Session cls = Session::start(corpus_language("class-models.pld"), "model");
  cls = play(cls, "menu @0.0 class\nmenu @0.1 class\n");
  auto assoc = cls.allowed_edge_types(at(cls, "n,@0.0"), at(cls, "n,@0.1"));
  REQUIRE(assoc.size() == 1);
  CHECK(assoc[0].is_compound("assoc"));
}

TEST_CASE("decision tree toggles") {
  auto def = corpus_language("boxes.pld");
  Session s = Session::resume(def, "root", corpus_term("terms/animals.term"), {});
  CHECK(s.concrete().is_compound("tree"));
  Session b = s.dispatch(KeyPressed{std::nullopt, Char{U'b'}});
  CHECK(b.concrete().is_compound("hbox"));
  Session t = b.dispatch(KeyPressed{std::nullopt, Char{U't'}});
  CHECK(t.concrete().is_compound("tree"));
  CHECK(shape(t.abstract()) == shape(s.abstract()));
  CHECK(shape(t.concrete()) == shape(s.concrete()));
}

TEST_CASE("fuel exhaustion is reported, not thrown") {
  auto def = std::make_shared<const LanguageDef>(parse_language_text(
      "(deflang t (abstract [x (x)]) (transform [(send x (key-pressed _ #\\l)) (send x (key-pressed 0 #\\l))])"
      " (reduce [(x) \"x\"]))"));
  SessionOptions opts;
  opts.fuel.max_steps = 20;
  Session s = Session::start(def, "x", opts);
  Session looped = s.dispatch(KeyPressed{std::nullopt, Char{U'l'}});
  CHECK(looped.fuel_exhausted());
  CHECK(looped.diagnostics().size() == 1);
  CHECK(identical(looped.abstract(), s.abstract()));
}

TEST_CASE("events reify as terms") {
  Session s = Session::start(corpus_language("dna.pld"), "DNA");
  CHECK(shape(s.event_term(KeyPressed{std::nullopt, Char{U'e'}})) == shape(T("(key-pressed -1 #\\e)")));
  CHECK(shape(s.event_term(KeyPressed{std::nullopt, std::string("up")})) == shape(T("(key-pressed -1 \"up\")")));
  CHECK(shape(s.event_term(DoubleClick{Identity{Atom("b"), Atom(4)}})) ==
        shape(T("(double-click (list \"b\" 4))")));
}

TEST_CASE("stale layout entries are pruned") {
  Session s = Session::start(corpus_language("nested-graph.pld"), "machine");
  s = play(s, "menu @0.0.0 entity\n");
  Identity node = at(s, "n,@0.0.0");
  s = s.dispatch(DragNode{node, 250, 250});
  LayoutCache cache = s.layout_cache();
  cache.positions[Identity{Atom("gone"), Atom(1)}] = {1, 1};
  Session r = Session::resume(s.language_ptr(), "machine", s.abstract(), cache).prune_layout_cache();
  CHECK(r.layout_cache().positions.count(Identity{Atom("gone"), Atom(1)}) == 0);
  CHECK(r.layout_cache().positions.at(node) == Point{250, 250});
}

TEST_CASE("opened entities keep their place across a reload") {
  Session s = Session::start(corpus_language("nested-graph.pld"), "machine");
  s = play(s, "menu @0.0.0 entity\n");
  Identity node = at(s, "n,@0.0.0");
  s = s.dispatch(DragNode{node, 310, 90});
  s = s.dispatch(DoubleClick{node});
  REQUIRE(s.abstract().children()[1].is_compound("dump"));
  Session r = load_session(save_session(s), s.language_ptr());
  CHECK(r.layout_cache().positions.at(node) == Point{310, 90});
  Session up = r.dispatch(KeyPressed{std::nullopt, std::string("up")});
  CHECK(render_svg(up.scene()) == render_svg(s.dispatch(KeyPressed{std::nullopt, std::string("up")}).scene()));
}
