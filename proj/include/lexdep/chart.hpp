#pragma once

#include <string>

#include "lexdep/estimator.hpp"
#include "lexdep/head_rules.hpp"
#include "lexdep/model.hpp"

namespace lexdep {

struct ParserConfig {
  double beam = 1000.0;              // beta; <= 0 disables the beam
  double initial_threshold = 1e-12;  // per-factor probability threshold; 0 disables
  double threshold_decay = 1e-3;     // multiplied in on each retry
  int max_retries = 4;
  bool punctuation_rule = false;
  bool tag_blind = false;
  bool tag_distributions = false;
  int max_length = 0;  // tokens; 0 = unlimited; longer sentences get the fallback
  std::string base_np_label = "NP";

  // The four configurations reported in the model's ablation: 1 = base,
  // 2 = +punctuation rule, 3 = +tag-blind counts, 4 = +tag distributions.
  static ParserConfig variant(int v);
};

struct ParseResult {
  ParseTree tree;
  double log_score = kLogZero;
  bool fallback = false;
  int retries = 0;
};

class Parser {
 public:
  Parser(const Model& model, const HeadRuleTable& rules, ParserConfig cfg = {});

  // Best tree under the ranking score; punctuation tokens are re-inserted
  // into the output so its leaves reproduce the input sentence. Throws if
  // the sentence has no words at all.
  ParseResult parse(const TaggedSentence& sentence) const;

  const ParserConfig& config() const { return cfg_; }

 private:
  const Model& model_;
  HeadRuleTable rules_;
  ParserConfig cfg_;
};

// Gap tag forced at the junction of two adjacent constituents by their
// boundary-baseNP flags.
GapTag junction_gap_tag(bool left_in_base_np, bool right_in_base_np);

// The comma constraint: when a comma separates two joined children, the
// right child must end directly before a comma or at the last word of the
// sentence. Token arguments are original indices of the junction words and
// the right child's last word.
bool comma_join_allowed(const TaggedSentence& sentence, const PunctConfig& punct,
                        int left_last_word, int right_first_word,
                        int right_last_word);

// Flat single-level tree used when the search finds no parse.
ParseTree fallback_tree(const TaggedSentence& sentence, const std::string& root_label);

// Score comparison shared by the parser and the enumeration oracle: higher
// score wins; near-ties go to the lexicographically smaller serialization.
constexpr double kScoreTieEps = 1e-10;
inline bool score_better(double lhs_score, const std::string& lhs_serial,
                         double rhs_score, const std::string& rhs_serial) {
  if (lhs_score > rhs_score + kScoreTieEps) return true;
  if (rhs_score > lhs_score + kScoreTieEps) return false;
  return lhs_serial < rhs_serial;
}

}  // namespace lexdep
