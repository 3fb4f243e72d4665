#include "lexdep/chart.hpp"

#include <cmath>

#include "doctest.h"
#include "lexdep/parseval.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/synthetic.hpp"

using namespace lexdep;

namespace {

ParseTree strip_punct(const ParseTree& t, const PunctConfig& punct) {
  if (t.is_leaf()) return t;
  std::vector<ParseTree> kids;
  for (const auto& c : t.children) {
    if (c.is_leaf() && punct.is_punct(c.label)) continue;
    kids.push_back(strip_punct(c, punct));
  }
  return ParseTree::node(t.label, std::move(kids));
}

Model overview_model() {
  return train(read_trees(testing::kOverviewTree), HeadRuleTable::defaults(), {});
}

ParserConfig exhaustive(int variant = 1) {
  ParserConfig cfg = ParserConfig::variant(variant);
  cfg.beam = 0.0;               // disabled
  cfg.initial_threshold = 0.0;  // disabled
  return cfg;
}

}  // namespace

TEST_CASE("memorizes a one-tree corpus") {
  Model m = overview_model();
  Parser parser(m, HeadRuleTable::defaults(), exhaustive());
  TaggedSentence s = read_tagged_sentence(testing::kOverviewTagged);
  ParseResult r = parser.parse(s);
  CHECK_FALSE(r.fallback);
  ParseTree gold = read_tree(testing::kOverviewTree);
  CHECK(strip_punct(r.tree, m.punct) == strip_punct(gold, m.punct));
  CHECK(std::isfinite(r.log_score));
}

TEST_CASE("output leaves reproduce the input sentence") {
  Model m = overview_model();
  Parser parser(m, HeadRuleTable::defaults(), exhaustive());
  TaggedSentence s = read_tagged_sentence(testing::kOverviewTagged);
  ParseResult r = parser.parse(s);
  auto leaves = r.tree.leaves();
  REQUIRE(static_cast<int>(leaves.size()) == s.size());
  for (int i = 0; i < s.size(); ++i) {
    CHECK(leaves[i].word == s.tokens[i].word);
    CHECK(leaves[i].tag == s.tokens[i].tag);
  }
}

TEST_CASE("reported score equals the re-scored output tree") {
  testing::SyntheticOptions opts;
  opts.sentences = 30;
  auto trees = testing::synthetic_corpus(opts);
  Model m = train(trees, HeadRuleTable::defaults(), {});
  for (int variant : {1, 2, 3}) {
    ParserConfig cfg = ParserConfig::variant(variant);
    Parser parser(m, HeadRuleTable::defaults(), cfg);
    ScoreConfig score_cfg{cfg.tag_blind, false};
    for (const auto& tree : trees) {
      TaggedSentence s = tree.to_sentence();
      ParseResult r = parser.parse(s);
      REQUIRE_FALSE(r.fallback);
      TreeScore rescored = score_tree(m, HeadRuleTable::defaults(), r.tree, score_cfg);
      CHECK(r.log_score == doctest::Approx(rescored.total).epsilon(1e-9));
    }
  }
}

TEST_CASE("oracle equivalence on a small corpus") {
  testing::SyntheticOptions opts;
  opts.sentences = 12;
  opts.seed = 11;
  auto trees = testing::synthetic_corpus(opts);
  Model m = train(trees, HeadRuleTable::defaults(), {});
  for (int variant : {1, 2, 3}) {
    ParserConfig cfg = exhaustive(variant);
    Parser parser(m, HeadRuleTable::defaults(), cfg);
    for (const auto& tree : trees) {
      TaggedSentence s = tree.to_sentence();
      auto oracle = testing::enumerate_best(m, HeadRuleTable::defaults(), s, cfg);
      REQUIRE(oracle.has_value());
      ParseResult r = parser.parse(s);
      REQUIRE_FALSE(r.fallback);
      CAPTURE(variant);
      CAPTURE(tree.to_string());
      CHECK(r.log_score == doctest::Approx(oracle->log_score).epsilon(1e-9));
      CHECK(strip_punct(r.tree, m.punct) == oracle->tree);
    }
  }
}

TEST_CASE("narrowing the beam never raises the score") {
  testing::SyntheticOptions opts;
  opts.sentences = 20;
  opts.seed = 3;
  auto trees = testing::synthetic_corpus(opts);
  Model m = train(trees, HeadRuleTable::defaults(), {});
  for (const auto& tree : trees) {
    TaggedSentence s = tree.to_sentence();
    double prev = std::numeric_limits<double>::infinity();
    for (double beam : {1000.0, 20.0, 3.0, 1.2}) {
      ParserConfig cfg;
      cfg.beam = beam;
      cfg.initial_threshold = 0.0;
      Parser parser(m, HeadRuleTable::defaults(), cfg);
      ParseResult r = parser.parse(s);
      REQUIRE_FALSE(r.fallback);
      CHECK(r.log_score <= prev + 1e-9);
      prev = r.log_score;
    }
  }
}

TEST_CASE("junction gap tags follow the boundary flags") {
  CHECK(junction_gap_tag(true, true) == GapTag::Between);
  CHECK(junction_gap_tag(true, false) == GapTag::End);
  CHECK(junction_gap_tag(false, true) == GapTag::Start);
  CHECK(junction_gap_tag(false, false) == GapTag::Null);
}

TEST_CASE("comma join rule") {
  TaggedSentence s =
      read_tagged_sentence("a/NN ,/, b/NN c/NN ,/, d/VB e/NN ./.");
  PunctConfig punct;
  // Comma between the children, right child ends before the second comma.
  CHECK(comma_join_allowed(s, punct, 0, 2, 3));
  // Comma between the children, right child ends mid-sentence before a word.
  CHECK_FALSE(comma_join_allowed(s, punct, 0, 2, 2));
  // Right child ends at the last word of the sentence.
  CHECK(comma_join_allowed(s, punct, 3, 5, 6));
  // No comma between the children: nothing to check.
  CHECK(comma_join_allowed(s, punct, 2, 3, 3));
}

TEST_CASE("comma rule changes parses only under variant 2") {
  // Train appositive-style commas, then parse a sentence where the comma
  // rule rejects the gold-like analysis: a constituent ending mid-sentence
  // after a comma junction.
  testing::SyntheticOptions opts;
  opts.sentences = 40;
  opts.seed = 5;
  auto trees = testing::synthetic_corpus(opts);
  Model m = train(trees, HeadRuleTable::defaults(), {});
  // "the dog , saw a cat ." with the comma inside the clause: variant 2
  // must not build [subject , verb-object] groupings whose right side ends
  // mid-sentence; variant 1 may.
  TaggedSentence s = read_tagged_sentence("the/DT dog/NN ,/, saw/VBD a/DT cat/NN ./.");
  ParseResult v1 = Parser(m, HeadRuleTable::defaults(), exhaustive(1)).parse(s);
  ParseResult v2 = Parser(m, HeadRuleTable::defaults(), exhaustive(2)).parse(s);
  // Variant 2's score can only drop: its chart is a subset.
  if (!v1.fallback && !v2.fallback) CHECK(v2.log_score <= v1.log_score + 1e-9);
}

TEST_CASE("no parse yields a flagged flat fallback") {
  Model m = overview_model();
  Parser parser(m, HeadRuleTable::defaults(), ParserConfig{});
  // Tags the model has never seen anywhere.
  TaggedSentence s = read_tagged_sentence("blorp/QQ1 fleem/QQ2");
  ParseResult r = parser.parse(s);
  CHECK(r.fallback);
  CHECK(r.tree.label == "S");
  CHECK(r.tree.leaf_count() == 2);
  CHECK(r.log_score == kLogZero);
}

TEST_CASE("threshold retries are reported") {
  testing::SyntheticOptions opts;
  opts.sentences = 20;
  auto trees = testing::synthetic_corpus(opts);
  Model m = train(trees, HeadRuleTable::defaults(), {});
  ParserConfig cfg;
  cfg.initial_threshold = 0.999999;  // absurdly tight; forces retries
  cfg.threshold_decay = 1e-3;
  Parser parser(m, HeadRuleTable::defaults(), cfg);
  ParseResult r = parser.parse(trees.front().to_sentence());
  CHECK(r.retries > 0);
  CHECK_FALSE(r.fallback);
}

TEST_CASE("empty or all-punctuation input is rejected") {
  Model m = overview_model();
  Parser parser(m, HeadRuleTable::defaults(), ParserConfig{});
  TaggedSentence empty;
  CHECK_THROWS_AS(parser.parse(empty), std::invalid_argument);
  CHECK_THROWS_AS(parser.parse(read_tagged_sentence(",/, ./.")),
                  std::invalid_argument);
}

TEST_CASE("max length short-circuits to the fallback") {
  Model m = overview_model();
  ParserConfig cfg;
  cfg.max_length = 3;
  Parser parser(m, HeadRuleTable::defaults(), cfg);
  ParseResult r = parser.parse(read_tagged_sentence(testing::kOverviewTagged));
  CHECK(r.fallback);
}

TEST_CASE("variant 4 requires distributions and can retag") {
  // Train "flies" as a verb: "the dog flies fast"-style clauses where VBZ
  // is the only parseable tag for the second word.
  std::string corpus;
  for (int i = 0; i < 10; ++i)
    corpus += "(S (NP (DT the) (NN dog)) (VP (VBZ flies) (NP (NN home))))\n";
  Model m = train(read_trees(corpus), HeadRuleTable::defaults(), {});
  ParserConfig cfg = exhaustive(4);
  Parser parser(m, HeadRuleTable::defaults(), cfg);

  CHECK_THROWS_AS(parser.parse(read_tagged_sentence("the/DT dog/NN flies/VBZ home/NN")),
                  std::invalid_argument);

  TaggedSentence s = read_tagged_sentence(
      "the/DT:1.0 dog/NN:1.0 flies/NNS:0.7,VBZ:0.3 home/NN:1.0");
  ParseResult r = parser.parse(s);
  REQUIRE_FALSE(r.fallback);
  // The NNS reading cannot parse, so the parser pays log 0.3 for VBZ.
  auto leaves = r.tree.leaves();
  CHECK(leaves[2].tag == "VBZ");
  ScoreConfig score_cfg{cfg.tag_blind, true};
  TreeScore rescored = score_tree(m, HeadRuleTable::defaults(), r.tree, score_cfg, &s);
  CHECK(r.log_score == doctest::Approx(rescored.total).epsilon(1e-9));
  CHECK(rescored.tag_part == doctest::Approx(std::log(0.3)).epsilon(1e-9));
}

TEST_CASE("memorization accuracy on the synthetic treebank") {
  testing::SyntheticOptions opts;
  opts.sentences = 50;
  opts.seed = 21;
  auto trees = testing::synthetic_corpus(opts);
  Model m = train(trees, HeadRuleTable::defaults(), {});
  Parser parser(m, HeadRuleTable::defaults(), ParserConfig::variant(3));
  std::vector<ParseTree> parsed;
  for (const auto& tree : trees) parsed.push_back(parser.parse(tree.to_sentence()).tree);
  EvalReport report = evaluate(trees, parsed, {});
  CHECK(report.all.labeled_recall() >= 95.0);
  CHECK(report.all.labeled_precision() >= 95.0);
}
