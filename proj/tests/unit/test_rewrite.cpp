#include "doctest.h"
#include "lambda_oracle.hpp"
#include "projed/normal_form.hpp"
#include "projed/rewrite.hpp"
#include "generators.hpp"
#include "support.hpp"

using namespace projed;
using testing::corpus_language;
using testing::corpus_term;
using testing::Rng;
using testing::shape;
using testing::T;

namespace {

// Letters map to upper-case strings inside one seq; a trailing hole stays.
std::string dna_oracle(const std::string& letters, bool hole) {
  std::string out = "(seq";
  for (char c : letters) out += " s:1:" + std::string(1, static_cast<char>(c - 'a' + 'A'));
  if (hole) out += " HOLE";
  return out + ")";
}

std::string dna_shape(const Term& t) {
  std::string out = "(" + std::string(t.functor());
  for (const auto& k : t.children()) out += k.is_hole() ? " HOLE" : " " + shape(k);
  return out + ")";
}

Term gene(const std::string& letters, bool hole) {
  std::vector<Term> kids;
  for (char c : letters) kids.push_back(make_compound(std::string(1, c), std::nullopt, {}));
  if (hole) kids.push_back(make_hole(HoleKind::Repeat, HoleRef{"DNA", {0}}));
  return make_compound("gene", std::nullopt, std::move(kids));
}

}  // namespace

TEST_CASE("DNA single steps") {
  auto dna = corpus_language("dna.pld");
  auto once = apply_rules_once(dna->reduce_rules, T("(gene (a))"), *dna);
  REQUIRE(once);
  CHECK(shape(*once) == shape(T("(seq (a))")));
  once = apply_rules_once(dna->reduce_rules, T("(seq (a))"), *dna);
  REQUIRE(once);
  CHECK(shape(*once) == shape(T("(seq \"A\")")));
  CHECK_FALSE(apply_rules_once(dna->reduce_rules, T("(seq \"A\")"), *dna));

  auto hit = find_and_apply(dna->reduce_rules, T("(seq (c) (t))"), *dna);
  REQUIRE(hit);
  CHECK(hit->rule == 2);
  CHECK(hit->path == Path{0});
}

TEST_CASE("DNA fixpoint and reduce") {
  auto dna = corpus_language("dna.pld");
  auto out = rewrite_fixpoint(dna->reduce_rules, T("(gene (a) (c))"), Fuel{}, *dna);
  CHECK(out.status == RewriteStatus::Converged);
  CHECK(out.steps_used == 3);
  CHECK(shape(out.result) == shape(T("(seq \"A\" \"C\")")));

  Term r = reduce(*dna, gene("aactgg", true));
  CHECK(dna_shape(r) == dna_oracle("aactgg", true));
}

TEST_CASE("DNA reduce agrees with a direct interpreter up to length 8") {
  auto dna = corpus_language("dna.pld");
  const std::string letters = "actg";
  std::size_t checked = 0;
  std::string seq;
  std::function<void(std::size_t)> all = [&](std::size_t len) {
    if (seq.size() == len) {
      bool hole = checked % 2 == 0;
      CHECK(dna_shape(reduce(*dna, gene(seq, hole))) == dna_oracle(seq, hole));
      ++checked;
      return;
    }
    for (char c : letters) {
      seq.push_back(c);
      all(len);
      seq.pop_back();
    }
  };
  for (std::size_t len = 0; len <= 8; ++len) all(len);
  CHECK(checked == 87381);
}

TEST_CASE("self-loop exhausts fuel") {
  auto def = parse_language_text("(deflang t (abstract [x (a)]) (reduce [(a) (a)]))");
  auto out = rewrite_fixpoint(def.reduce_rules, T("(a)"), Fuel{50}, def);
  CHECK(out.status == RewriteStatus::FuelExhausted);
  CHECK(out.steps_used == 50);
  CHECK_THROWS_AS(reduce(def, T("(a)"), Fuel{50}), FuelExhaustedError);
}

TEST_CASE("transforms") {
  auto boxes = corpus_language("boxes.pld");
  Term tree = corpus_term("terms/animals.term").children()[1];
  Term boxed = make_compound("root", std::nullopt, {T("(boxes)"), tree});
  Term sent = make_compound("send", std::nullopt, {boxed, T("(key-pressed 5 #\\t)")});
  auto out = transform(*boxes, sent);
  CHECK(out.status == RewriteStatus::Converged);
  CHECK(out.result.is_compound("root"));
  CHECK(out.result.children()[0].is_compound("tree"));
  CHECK(out.result.children()[1].same_node(tree));

  auto dna = corpus_language("dna.pld");
  Term g = gene("ac", false);
  out = transform(*dna, g);
  CHECK(out.steps_used == 0);
  CHECK(out.result.same_node(g));
}

TEST_CASE("decision tree reduces to nested trees or boxes") {
  auto boxes = corpus_language("boxes.pld");
  Term root = corpus_term("terms/animals.term");
  Term as_tree = reduce(*boxes, root);
  CHECK(as_tree.is_compound("tree"));
  CHECK(as_tree.children()[0].atom().as_string() == "hair?");
  CHECK(is_normal_form(as_tree));

  Term as_boxes = reduce(*boxes, replace_at_path(root, {0}, T("(boxes)")));
  CHECK(as_boxes.is_compound("hbox"));
  CHECK(is_normal_form(as_boxes));
}

TEST_CASE("reduce rejects output that is not displayable") {
  auto def = parse_language_text("(deflang t (abstract [x (a)]) (reduce [(a) (bogus)]))");
  CHECK_THROWS_AS(reduce(def, T("(a)")), NotNormalForm);
}

TEST_CASE("one evaluation step per key press on the Y term") {
  auto lam = corpus_language("lambda.pld");
  Term t = corpus_term("terms/y-ones.term");
  auto oracle = testing::lambda::from_term(t);
  for (int k = 1; k <= 6; ++k) {
    Term sent = make_compound("send", std::nullopt, {t, T("(key-pressed -1 #\\e)")});
    auto out = transform(*lam, sent);
    REQUIRE(out.status == RewriteStatus::Converged);
    t = out.result;
    oracle = testing::lambda::eval_step(oracle);
    CHECK(shape(t) == shape(T(testing::lambda::print(oracle))));
  }
}


TEST_CASE("a converged result has no redex left") {
  Rng rng(31);
  testing::RuleGen gen{rng, {}, {}};
  int converged = 0, exhausted = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text = "(deflang r (abstract [x (k)]) (transform";
    int rules = 1 + rng.below(4);
    for (int r = 0; r < rules; ++r) text += " " + gen.rule();
    text += "))";
    CAPTURE(text);
    LanguageDef def = parse_language_text(text);
    std::string tree_text = testing::random_tree(rng, 4);
    if (tree_text[0] != '(') tree_text = "(k " + tree_text + ")";
    Term tree = T(tree_text);
    auto out = rewrite_fixpoint(def.transform_rules, tree, Fuel{200}, def);
    if (out.status == RewriteStatus::Converged) {
      ++converged;
      CHECK_FALSE(apply_rules_once(def.transform_rules, out.result, def));
    } else {
      ++exhausted;
      CHECK(out.steps_used == 200);
    }
  }
  CHECK(converged > 100);
  CHECK(exhausted > 10);
}
