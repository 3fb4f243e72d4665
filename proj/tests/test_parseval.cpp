#include "lexdep/parseval.hpp"

#include "doctest.h"
#include "support/fixtures.hpp"

using namespace lexdep;

namespace {

std::vector<ParseTree> trees_of(const std::string& text) { return read_trees(text); }

}  // namespace

TEST_CASE("identity scores perfectly") {
  auto gold = trees_of(testing::kOverviewTree +
                       std::string("\n(S (NP (NN dog)) (VP (VBD ran)))"));
  EvalReport r = evaluate(gold, gold, {});
  CHECK(r.all.labeled_recall() == doctest::Approx(100.0));
  CHECK(r.all.labeled_precision() == doctest::Approx(100.0));
  CHECK(r.all.crossing_per_sentence() == doctest::Approx(0.0));
  CHECK(r.all.pct_zero_crossing() == doctest::Approx(100.0));
}

TEST_CASE("hand-built five-vs-four constituent pair") {
  // Gold has 5 constituents: S, NP, VP, inner NP, PP; test has 4 of which 3
  // are correct (the PP span is wrong), so LP = 75% and LR = 60%.
  auto gold = trees_of(
      "(S (NP (NN dog)) (VP (VBD ran) (NP (NN home) (PP (IN in) (NN mud)))))");
  auto test = trees_of(
      "(S (NP (NN dog)) (VP (VBD ran) (NP (NN home)) (IN in) (NN mud)))");
  EvalReport r = evaluate(gold, test, {});
  CHECK(r.all.gold_constituents == 5);
  CHECK(r.all.test_constituents == 4);
  CHECK(r.all.matched == 3);
  CHECK(r.all.labeled_precision() == doctest::Approx(75.0));
  CHECK(r.all.labeled_recall() == doctest::Approx(60.0));
}

TEST_CASE("swapping gold and test swaps recall and precision") {
  auto gold = trees_of(
      "(S (NP (NN dog)) (VP (VBD ran) (NP (NN home) (PP (IN in) (NN mud)))))");
  auto test = trees_of(
      "(S (NP (NN dog)) (VP (VBD ran) (NP (NN home)) (IN in) (NN mud)))");
  EvalReport fwd = evaluate(gold, test, {});
  EvalReport rev = evaluate(test, gold, {});
  CHECK(fwd.all.labeled_recall() == doctest::Approx(rev.all.labeled_precision()));
  CHECK(fwd.all.labeled_precision() == doctest::Approx(rev.all.labeled_recall()));
}

TEST_CASE("punctuation-only differences change nothing") {
  auto gold = trees_of(testing::kOverviewTree);
  // Same structure with the commas and period attached elsewhere.
  auto test = trees_of(
      "(S (NP (NP (NNP John) (NNP Smith))"
      "       (NP (NP (DT the) (NN president))"
      "           (PP (, ,) (IN of) (NP (NNP IBM)) (, ,)))) "
      "   (VP (VBD announced)"
      "       (NP (PRP$ his) (NN resignation))"
      "       (NP (NN yesterday) (. .))))");
  EvalReport r = evaluate(gold, test, {});
  CHECK(r.all.labeled_recall() == doctest::Approx(100.0));
  CHECK(r.all.labeled_precision() == doctest::Approx(100.0));
  CHECK(r.all.crossing_per_sentence() == doctest::Approx(0.0));
}

TEST_CASE("crossing brackets are counted per offending test constituent") {
  // Gold groups (a b) (c d); test groups a (b c) d: one crossing bracket.
  auto gold = trees_of("(S (X (A a) (B b)) (Y (C c) (D d)))");
  auto test = trees_of("(S (A a) (X (B b) (C c)) (D d))");
  EvalReport r = evaluate(gold, test, {});
  CHECK(r.all.crossing == 1);
  CHECK(r.all.pct_zero_crossing() == doctest::Approx(0.0));
  CHECK(r.all.pct_le2_crossing() == doctest::Approx(100.0));
}

TEST_CASE("ADVP and PRT collapse under the flag") {
  auto gold = trees_of("(S (NP (NN dog)) (VP (VBD ran) (PRT (RP up))))");
  auto test = trees_of("(S (NP (NN dog)) (VP (VBD ran) (ADVP (RP up))))");
  EvalOptions plain;
  EvalReport strict = evaluate(gold, test, plain);
  CHECK(strict.all.matched < strict.all.gold_constituents);
  EvalOptions collapse;
  collapse.collapse_advp_prt = true;
  EvalReport loose = evaluate(gold, test, collapse);
  CHECK(loose.all.labeled_recall() == doctest::Approx(100.0));
}

TEST_CASE("root constituent can be excluded") {
  auto gold = trees_of("(S (NP (NN dog)) (VP (VBD ran)))");
  EvalOptions opts;
  opts.include_root = false;
  EvalReport r = evaluate(gold, gold, opts);
  CHECK(r.all.gold_constituents == 2);  // NP and VP only
}

TEST_CASE("length cutoffs bucket sentences") {
  std::string small = "(S (NP (NN dog)) (VP (VBD ran)))";
  std::string big = "(S (NP (NN dog))";
  for (int i = 0; i < 50; ++i) big += " (NP (NN cat))";
  big += " (VP (VBD ran)))";
  auto gold = trees_of(small + "\n" + big);
  EvalOptions opts;
  opts.length_cutoffs = {40, 100};
  EvalReport r = evaluate(gold, gold, opts);
  CHECK(r.by_cutoff.at(40).sentences == 1);
  CHECK(r.by_cutoff.at(100).sentences == 2);
  CHECK(r.all.sentences == 2);
}

TEST_CASE("misaligned words raise an error naming the sentence") {
  auto gold = trees_of("(S (NP (NN dog)) (VP (VBD ran)))");
  auto test = trees_of("(S (NP (NN cat)) (VP (VBD ran)))");
  CHECK_THROWS_WITH(evaluate(gold, test, {}), doctest::Contains("sentence 1"));
  auto short_test = trees_of("(S (NP (NN dog)))");
  CHECK_THROWS(evaluate(gold, short_test, {}));
}

TEST_CASE("mismatched list lengths are rejected") {
  auto gold = trees_of("(S (NP (NN dog)) (VP (VBD ran)))");
  std::vector<ParseTree> empty;
  CHECK_THROWS_AS(evaluate(gold, empty, {}), std::invalid_argument);
}

TEST_CASE("report formatting") {
  auto gold = trees_of("(S (NP (NN dog)) (VP (VBD ran)))");
  EvalReport r = evaluate(gold, gold, {});
  std::string table = format_report(r);
  CHECK(table.find("LR") != std::string::npos);
  CHECK(table.find("100.0%") != std::string::npos);
  std::string rows = machine_rows(r);
  CHECK(rows.find("all\t1\t") != std::string::npos);
}
