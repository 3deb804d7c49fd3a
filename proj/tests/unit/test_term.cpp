#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace projed;
using testing::Rng;
using testing::shape;
using testing::T;

TEST_CASE("make_compound coins or keeps identities") {
  Term a = make_compound("a", std::nullopt, {});
  CHECK(a.is_compound("a"));
  CHECK(a.children().empty());
  REQUIRE(a.identity());
  CHECK(a.identity()->parts().size() == 1);
  CHECK(a.identity()->parts()[0].is_int());

  Term box = make_compound("box", Identity{Atom("b"), Atom(7)}, {T("(x)")});
  CHECK(*box.identity() == Identity{Atom("b"), Atom(7)});
  CHECK(box.children().size() == 1);

  Term g1 = make_compound("gene", std::nullopt, {});
  Term g2 = make_compound("gene", std::nullopt, {});
  CHECK(structurally_equal(g1, g2));
  CHECK_FALSE(identical(g1, g2));
  CHECK(*g1.identity() != *g2.identity());
}

TEST_CASE("structural equality ignores identities only") {
  CHECK(structurally_equal(T("(a)"), T("(a)")));
  CHECK_FALSE(structurally_equal(T("(a)"), T("(c)")));
  CHECK_FALSE(structurally_equal(T("(a \"x\")"), T("(a \"y\")")));
  CHECK_FALSE(structurally_equal(T("(a 1)"), T("(a \"1\")")));
  CHECK_FALSE(structurally_equal(T("(a (b))"), T("(a (b) (b))")));
  CHECK(structurally_equal(T("(a #\\x #t 3)"), T("(a #\\x #t 3)")));
}

namespace {

// Balanced pair tree with `n` compound nodes; leaf atoms count up from base.
Term pair_tree(int n, int& leaf, int odd_leaf) {
  if (n <= 1) {
    int v = leaf++;
    return make_compound("pair", std::nullopt,
                         {Term(Atom(v == odd_leaf ? -1 : v)), Term(Atom(v))});
  }
  int left = (n - 1) / 2;
  Term l = left > 0 ? pair_tree(left, leaf, odd_leaf) : Term(Atom(0));
  Term r = pair_tree(n - 1 - left, leaf, odd_leaf);
  return make_compound("pair", std::nullopt, {l, r});
}

}  // namespace

TEST_CASE("deep pair trees differing in one leaf are unequal") {
  int leaves = 0;
  pair_tree(100, leaves, -100);
  REQUIRE(leaves > 20);
  for (int odd = 0; odd < leaves; odd += 3) {
    int l1 = 0, l2 = 0;
    Term a = pair_tree(100, l1, -100);
    Term b = pair_tree(100, l2, odd);
    // oracle: identity-free serialisations
    CHECK(structurally_equal(a, b) == (shape(a) == shape(b)));
    CHECK_FALSE(structurally_equal(a, b));
  }
  int l1 = 0, l2 = 0;
  CHECK(structurally_equal(pair_tree(100, l1, -5), pair_tree(100, l2, -5)));
}

TEST_CASE("structural equality is an equivalence agreeing with the text oracle") {
  Rng rng(11);
  std::vector<Term> pool;
  for (int i = 0; i < 300; ++i) pool.push_back(rng.term(3));
  // force some equal pairs by cloning through the persist format
  for (int i = 0; i < 60; ++i) pool.push_back(load_term(save_term(pool[static_cast<std::size_t>(i)])));
  for (std::size_t i = 0; i < pool.size(); i += 3) {
    const Term& a = pool[i];
    CHECK(structurally_equal(a, a));
    for (std::size_t j = 0; j < pool.size(); j += 5) {
      const Term& b = pool[j];
      bool ab = structurally_equal(a, b);
      CHECK(ab == structurally_equal(b, a));
      CHECK(ab == (shape(a) == shape(b)));
    }
  }
}

namespace {

Term rename_ids(const Term& t, std::int64_t offset) {
  if (t.is_atom()) return t;
  if (t.is_hole()) {
    Hole h = t.hole();
    h.id = Identity{Atom("r"), Atom(offset)};
    return Term(h);
  }
  std::vector<Term> kids;
  for (const auto& k : t.children()) kids.push_back(rename_ids(k, offset + 1));
  return Term(Compound{t.compound().functor, Identity{Atom(offset)}, std::move(kids)});
}

}  // namespace

TEST_CASE("renaming identities preserves structural equality") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    Term a = rng.term(4);
    Term b = rng.term(4);
    CHECK(structurally_equal(a, rename_ids(a, 1000)));
    CHECK(structurally_equal(a, b) == structurally_equal(rename_ids(a, 5), rename_ids(b, 9)));
  }
}

TEST_CASE("find_by_identity walks in pre-order") {
  Term root = T("(gene (a) (c) (t))");
  auto hit = find_by_identity(root, *root.identity());
  REQUIRE(hit);
  CHECK(hit->path.empty());
  CHECK(hit->term.same_node(root));

  const Term& third = root.children()[2];
  hit = find_by_identity(root, *third.identity());
  REQUIRE(hit);
  CHECK(hit->path == Path{2});
  CHECK(hit->term.is_compound("t"));

  CHECK_FALSE(find_by_identity(root, Identity{Atom("nope")}));

  // duplicate identities resolve to the pre-order-first one
  Identity dup{Atom("dup")};
  Term d1 = make_compound("first", dup, {});
  Term d2 = make_compound("second", dup, {});
  Term tree = make_compound("r", std::nullopt, {make_compound("w", std::nullopt, {d1}), d2});
  hit = find_by_identity(tree, dup);
  REQUIRE(hit);
  CHECK(hit->term.is_compound("first"));
  CHECK(hit->path == Path{0, 0});
}

TEST_CASE("replace_at_path rebuilds only the spine") {
  Term root = T("(gene (a) (c))");
  Term t = T("(t)");
  CHECK(replace_at_path(root, {}, t).same_node(t));

  Term out = replace_at_path(root, {1}, t);
  CHECK(structurally_equal(out, T("(gene (a) (t))")));
  CHECK(out.children()[0].same_node(root.children()[0]));
  CHECK(*out.identity() == *root.identity());

  CHECK_THROWS_AS(replace_at_path(root, {5}, t), CorruptCacheError);
  CHECK_THROWS_AS(replace_at_path(root, {0, 0}, t), CorruptCacheError);
  CHECK_THROWS_AS(subterm_at(root, {2}), CorruptCacheError);
}

TEST_CASE("find after replace returns the replacement") {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    Term root = rng.term(4, false);
    std::vector<std::pair<Identity, Path>> ids;
    std::function<void(const Term&, Path&)> walk = [&](const Term& t, Path& p) {
      if (t.identity()) ids.emplace_back(*t.identity(), p);
      for (std::size_t k = 0; k < t.children().size(); ++k) {
        p.push_back(k);
        walk(t.children()[k], p);
        p.pop_back();
      }
    };
    Path p;
    walk(root, p);
    if (ids.empty()) continue;
    const Identity& x = ids[static_cast<std::size_t>(rng.below(static_cast<int>(ids.size())))].first;
    auto at = find_by_identity(root, x);
    REQUIRE(at);
    Term repl = make_compound("replacement", x, {Term(Atom(i))});
    Term next = replace_at_path(root, at->path, repl);
    auto again = find_by_identity(next, x);
    REQUIRE(again);
    CHECK(again->term.same_node(repl));
  }
}

TEST_CASE("fresh identities never repeat") {
  std::set<Identity> seen;
  for (int i = 0; i < 10000; ++i) {
    Identity id = i % 3 == 0 ? *make_compound("x", std::nullopt, {}).identity() : fresh_identity();
    CHECK(id.parts().size() == 1);
    seen.insert(id);
  }
  CHECK(seen.size() == 10000);
  CHECK(fresh_identity() != fresh_identity());
}

TEST_CASE("identities must be non-empty") {
  CHECK_THROWS(Identity(std::vector<Atom>{}));
}

TEST_CASE("reify_identity and identity_from_term are inverse") {
  Identity one{Atom(5)};
  CHECK(reify_identity(one).is_atom());
  Identity two{Atom("b"), Atom(3)};
  Term r = reify_identity(two);
  CHECK(structurally_equal(r, T("(list \"b\" 3)")));
  CHECK(identity_from_term(r) == two);
  CHECK(identity_from_term(reify_identity(one)) == one);
}

TEST_CASE("utf8 round trip") {
  for (char32_t cp : {U'a', U'é', U'λ', U'●', U'\U0001F600'}) {
    auto s = utf8_encode(cp);
    auto back = utf8_decode(s);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == cp);
  }
}
