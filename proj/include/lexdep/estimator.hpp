#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lexdep/model.hpp"

namespace lexdep {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Probability floor for a tag missing from a token's listed distribution
// (the tagger truncates low-probability tags).
constexpr double kTagProbFloor = 1e-10;

// lambda = d / (d + 1)
double lambda_weight(uint32_t denom);

struct BackoffEstimate {
  std::optional<double> e1, e23, e4;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double value = 0.0;
  uint32_t d1 = 0, d23 = 0, d4 = 0;  // denominators, for diagnostics
};

struct WordTagStr {
  std::string word;
  std::string tag;
};

class Estimator {
 public:
  explicit Estimator(const Model& model) : model_(model) {}

  // Backed-off F(relation | modifier, head, delta). The head may be the
  // root pseudo-token (use root_word_tag()).
  BackoffEstimate dependency_prob(uint32_t relation, const WordTag& modifier,
                                  const WordTag& head, uint8_t delta,
                                  bool tag_blind) const;

  // String-level convenience; unseen relation or tags give value 0.
  BackoffEstimate dependency_prob(const RelationTriple& relation,
                                  const WordTagStr& modifier, const WordTagStr& head,
                                  const DeltaFeatures& delta, bool tag_blind) const;

  BackoffEstimate gap_prob(GapTag tag, const WordTag& left, const WordTag& right,
                           bool comma) const;
  BackoffEstimate gap_prob(GapTag tag, const WordTagStr& left, const WordTagStr& right,
                           bool comma) const;

  // Sum of per-arc log probabilities for a full dependency assignment
  // (one arc per reduced item, root included); kLogZero if any arc is dead.
  double score_dependencies(const ReducedSentence& reduced,
                            const TaggedSentence& sentence,
                            const std::vector<Dependency>& deps,
                            bool tag_blind) const;

  // Sum over gaps of log P(tag | context).
  double score_gaps(const TaggedSentence& sentence, const std::vector<Gap>& gaps) const;

  static WordTag root_word_tag() { return WordTag{kRootId, kRootId}; }

  const Model& model() const { return model_; }

 private:
  const Model& model_;
};

// Sum over tokens of log P(tag | S) for the tags a parse uses. The sentence
// must carry tag distributions.
double tag_distribution_term(const TaggedSentence& sentence,
                             const std::vector<std::string>& chosen_tags);

struct ScoreConfig {
  bool tag_blind = false;
  bool tag_distributions = false;
};

struct TreeScore {
  double total = 0.0;
  double dependency_part = 0.0;
  double gap_part = 0.0;
  double tag_part = 0.0;
};

// Full ranking score of a tree: gap model + dependency model (+ the tag
// term when enabled; distributions then come from `sentence`, which must
// match the tree's words).
TreeScore score_tree(const Model& model, const HeadRuleTable& rules,
                     const ParseTree& tree, const ScoreConfig& cfg = {},
                     const TaggedSentence* sentence = nullptr);

}  // namespace lexdep
