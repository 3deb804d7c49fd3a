#include "doctest.h"
#include "projed/rewrite.hpp"
#include "projed/scene.hpp"
#include "support.hpp"

using namespace projed;
using testing::corpus_language;
using testing::T;

namespace {

Scene lay(std::string_view text, const LayoutCache& cache = {}) {
  return layout(validate_nf(T(text)), cache);
}

std::size_t count_kind(const Scene& s, Primitive::Kind k) {
  std::size_t n = 0;
  for (const auto& p : s.primitives) n += p.kind == k;
  return n;
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("text metrics") {
  CHECK(measure_text("A", 12) == TextSize{7, 14});
  CHECK(measure_text("", 12) == TextSize{0, 14});
  CHECK(measure_text("AAAA", 10) == TextSize{24, 12});
  CHECK(measure_text("λλ", 10) == TextSize{12, 12});
}

TEST_CASE("normal form recognition") {
  CHECK(is_normal_form(T("(seq \"A\" (nl))")));
  CHECK_FALSE(is_normal_form(T("(gene (a))")));
  CHECK(is_normal_form(T("(graph (edge-types))")));

  NF hbox = validate_nf(T("(hbox (outline 1) (centre \"x\") (align \"y\"))"));
  CHECK(hbox.kind == NF::Kind::Box);
  CHECK(hbox.box == BoxKind::HBox);
  REQUIRE(hbox.border);
  CHECK(*hbox.border == 1);
  CHECK(hbox.positions == std::vector<Position>{Position::Centre, Position::Align});

  NF thumb = validate_nf(T("(thumbnail 0 0 40 40 (graph (edge-types)))"));
  CHECK(thumb.kind == NF::Kind::Thumbnail);
  REQUIRE(thumb.children.size() == 1);
  CHECK(thumb.children[0].kind == NF::Kind::Graph);

  NF ell = validate_nf(T("(ellipse 0 0 50 50 #f #f)"));
  CHECK(ell.kind == NF::Kind::Ellipse);
  CHECK(ell.w == 50);
  CHECK(ell.h == 50);
  CHECK_FALSE(ell.fill);
}

TEST_CASE("rejections name the offending path") {
  try {
    validate_nf(T("(seq \"A\" (hbox (outline 1) (centre (bogus))))"));
    FAIL("expected NotNormalForm");
  } catch (const NotNormalForm& e) {
    CHECK(e.path() == Path{1, 1, 0});
    CHECK(e.offending().is_compound("bogus"));
    CHECK_FALSE(e.expected().empty());
  }
}

TEST_CASE("text runs flow left to right") {
  Scene s = lay("(seq \"A\" \"C\")");
  REQUIRE(count_kind(s, Primitive::Kind::Text) == 2);
  const auto& a = s.primitives[0];
  const auto& c = s.primitives[1];
  CHECK(a.text == "A");
  CHECK(c.text == "C");
  CHECK(c.box.x == doctest::Approx(a.box.x + a.box.w));
  CHECK(c.box.y == a.box.y);

  Scene two = lay("(seq \"A\" (nl) \"C\")");
  CHECK(two.primitives.back().box.y > two.primitives.front().box.y);
}

TEST_CASE("font steps shrink and grow text") {
  Scene s = lay("(seq (font (-) \"a\") \"b\" (font (+) \"c\"))");
  std::vector<double> sizes;
  for (const auto& p : s.primitives)
    if (p.kind == Primitive::Kind::Text) sizes.push_back(p.font_size);
  CHECK(sizes == std::vector<double>{10, 12, 14});
}

TEST_CASE("cached node positions are kept") {
  const char* g = "(graph (edge-types) ((node \"n\" 1) (entity) 1 \"x\") ((node \"n\" 2) (entity) 2 \"y\"))";
  LayoutCache cache;
  cache.positions[Identity{Atom("n"), Atom(1)}] = {200, 50};
  for (int i = 0; i < 3; ++i) {
    Scene s = lay(g, cache);
    bool found = false;
    for (const auto& p : s.primitives) {
      if (p.kind == Primitive::Kind::Node && p.concrete == Identity{Atom("n"), Atom(1)}) {
        CHECK(p.box.x == 200);
        CHECK(p.box.y == 50);
        found = true;
      }
    }
    CHECK(found);
    CHECK(s.placements.at(Identity{Atom("n"), Atom(1)}) == Point{200, 50});
    CHECK(s.placements.count(Identity{Atom("n"), Atom(2)}) == 1);
  }
}

TEST_CASE("hit testing") {
  Scene s = lay("((box \"b\" 1) (outline 1) (centre \"x\"))");
  auto hit = hit_test(s, 3, 3);
  REQUIRE(hit);
  CHECK(hit->concrete == Identity{Atom("b"), Atom(1)});
  CHECK_FALSE(hit_test(s, 500, 500));

  Scene manual;
  Primitive a;
  a.kind = Primitive::Kind::Rectangle;
  a.box = {0, 0, 30, 30};
  a.selectable = true;
  a.concrete = Identity{Atom(1)};
  Primitive b = a;
  b.box = {10, 10, 30, 30};
  b.concrete = Identity{Atom(2)};
  manual.primitives = {a, b};
  auto top = hit_test(manual, 15, 15);
  REQUIRE(top);
  CHECK(top->index == 1);
  CHECK(top->concrete == Identity{Atom(2)});
  auto only_a = hit_test(manual, 5, 5);
  REQUIRE(only_a);
  CHECK(only_a->index == 0);
}

TEST_CASE("SVG output") {
  Scene empty;
  std::string svg = render_svg(empty);
  CHECK(count_substr(svg, "<svg") == 1);
  CHECK(count_substr(svg, "<rect") == 0);
  CHECK(count_substr(svg, "<text") == 0);

  Scene rect = lay("(rectangle 0 0 30 20 #f #f)");
  svg = render_svg(rect);
  CHECK(count_substr(svg, "<rect") == 1);
  CHECK(svg.find("x=\"0\" y=\"0\" width=\"30\" height=\"20\"") != std::string::npos);

  auto dna = corpus_language("dna.pld");
  std::vector<Term> kids;
  for (const char* l : {"a", "a", "c", "t", "g", "g"}) kids.push_back(make_compound(l, std::nullopt, {}));
  kids.push_back(make_hole(HoleKind::Repeat, HoleRef{"DNA", {0}}));
  Scene ds = layout(validate_nf(reduce(*dna, make_compound("gene", std::nullopt, kids))));
  svg = render_svg(ds);
  CHECK(count_substr(svg, "<text") == 6);
  CHECK(count_substr(svg, "fill=\"blue\"") == 1);
  std::string letters;
  for (const auto& p : ds.primitives)
    if (p.kind == Primitive::Kind::Text) letters += p.text;
  CHECK(letters == "AACTGG");
  CHECK(render_text(ds) == "AACTGG[●]\n");
}

TEST_CASE("character grid") {
  CHECK(render_text(lay("(seq \"class\" (space) \"Library\")")) == "class Library\n");
  CHECK(render_text(lay("(seq \"a\" (nl) \"b\")")) == "a\nb\n");
  // the margin applies from the next line on
  CHECK(render_text(lay("(indent 10 (seq \"a\" (nl) \"x\"))")) == "a\n x\n");
  CHECK(render_text(lay("(indent 14 (seq \"a\" (nl) \"x\"))")) == "a\n  x\n");
  CHECK(render_text(lay("(indent 6 (seq \"a\" (nl) \"x\"))")) == "a\nx\n");
  // adjacent runs stay adjacent however long the line gets
  CHECK(render_text(lay("(seq \"There is a red cage holding a \" \"blue\" \" key.\")")) ==
        "There is a red cage holding a blue key.\n");
}

TEST_CASE("number formatting") {
  CHECK(format_number(3) == "3");
  CHECK(format_number(2.5) == "2.5");
  CHECK(format_number(1.0 / 3) == "0.33");
  CHECK(format_number(-0.0) == "0");
}

TEST_CASE("thumbnails scale their graph into the frame") {
  Scene s = lay(
      "(seq (thumbnail 0 0 40 40 (graph (edge-types) ((node \"n\" 1) (entity) 1 (rectangle 0 0 50 50 #f #f))"
      " ((node \"n\" 2) (entity) 2 (rectangle 0 0 50 50 #f #f)))))");
  REQUIRE_FALSE(s.primitives.empty());
  for (const auto& p : s.primitives) {
    CHECK_FALSE(p.selectable);
    CHECK(p.box.x + p.box.w <= 40.001);
    CHECK(p.box.y + p.box.h <= 40.001);
  }
  CHECK(s.placements.empty());
  CHECK(s.graphs.empty());
}
