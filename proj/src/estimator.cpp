#include "lexdep/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace lexdep {

double lambda_weight(uint32_t denom) {
  return static_cast<double>(denom) / (static_cast<double>(denom) + 1.0);
}

namespace {

// E1/E23/E4 with the count-derived interpolation weights.
BackoffEstimate combine(uint32_t n1, uint32_t d1, uint32_t n2, uint32_t d2,
                        uint32_t n3, uint32_t d3, uint32_t n4, uint32_t d4) {
  BackoffEstimate est;
  est.d1 = d1;
  est.d23 = d2 + d3;
  est.d4 = d4;
  if (d1 > 0) est.e1 = static_cast<double>(n1) / d1;
  if (d2 + d3 > 0) est.e23 = static_cast<double>(n2 + n3) / (d2 + d3);
  if (d4 > 0) est.e4 = static_cast<double>(n4) / d4;
  est.lambda1 = lambda_weight(d1);
  est.lambda2 = lambda_weight(d2 + d3);

  if (est.e1) {
    est.value = est.lambda1 * *est.e1 + (1.0 - est.lambda1) * est.e23.value_or(0.0);
  } else if (est.e23) {
    est.value = est.lambda2 * *est.e23 + (1.0 - est.lambda2) * est.e4.value_or(0.0);
  } else if (est.e4) {
    est.value = *est.e4;
  } else {
    est.value = 0.0;
  }
  return est;
}

}  // namespace

BackoffEstimate Estimator::dependency_prob(uint32_t relation, const WordTag& modifier,
                                           const WordTag& head, uint8_t delta,
                                           bool tag_blind) const {
  uint32_t d[4], n[4];
  for (int level = 0; level < 4; ++level) {
    DepKey key = Model::dep_key(level, tag_blind, modifier, head, delta);
    d[level] = model_.dep_denom(level, tag_blind, key);
    n[level] = model_.dep_numer(level, tag_blind, key, relation);
  }
  return combine(n[0], d[0], n[1], d[1], n[2], d[2], n[3], d[3]);
}

BackoffEstimate Estimator::dependency_prob(const RelationTriple& relation,
                                           const WordTagStr& modifier,
                                           const WordTagStr& head,
                                           const DeltaFeatures& delta,
                                           bool tag_blind) const {
  auto rel = model_.lookup_triple(relation);
  if (!rel) return BackoffEstimate{};
  WordTag mod_wt = model_.lookup_word_tag(modifier.word, modifier.tag);
  WordTag head_wt = relation.modifier == kRootMarker || head.word == kRootMarker
                        ? root_word_tag()
                        : model_.lookup_word_tag(head.word, head.tag);
  return dependency_prob(*rel, mod_wt, head_wt, delta.encode(), tag_blind);
}

BackoffEstimate Estimator::gap_prob(GapTag tag, const WordTag& left,
                                    const WordTag& right, bool comma) const {
  uint32_t d[4], n[4];
  for (int level = 0; level < 4; ++level) {
    GapKey key = Model::gap_key(level, left, right, comma);
    d[level] = model_.gap_denom_count(level, key);
    n[level] = model_.gap_numer_count(level, key, tag);
  }
  return combine(n[0], d[0], n[1], d[1], n[2], d[2], n[3], d[3]);
}

BackoffEstimate Estimator::gap_prob(GapTag tag, const WordTagStr& left,
                                    const WordTagStr& right, bool comma) const {
  return gap_prob(tag, model_.lookup_word_tag(left.word, left.tag),
                  model_.lookup_word_tag(right.word, right.tag), comma);
}

double Estimator::score_dependencies(const ReducedSentence& reduced,
                                     const TaggedSentence& sentence,
                                     const std::vector<Dependency>& deps,
                                     bool tag_blind) const {
  if (deps.size() != reduced.size())
    throw std::invalid_argument(
        "score_dependencies: expected one dependency per reduced item");
  double total = 0.0;
  for (const Dependency& dep : deps) {
    const ReducedItem& mod = reduced[dep.modifier];
    WordTagStr head{kRootMarker, kRootMarker};
    if (dep.head != kRootHead) {
      head.word = reduced[dep.head].word;
      head.tag = reduced[dep.head].tag;
    }
    DeltaFeatures dl = delta(reduced, sentence, dep.modifier, dep.head, model_.punct);
    BackoffEstimate est = dependency_prob(dep.relation, WordTagStr{mod.word, mod.tag},
                                          head, dl, tag_blind);
    if (est.value <= 0.0) return kLogZero;
    total += std::log(est.value);
  }
  return total;
}

double Estimator::score_gaps(const TaggedSentence& sentence,
                             const std::vector<Gap>& gaps) const {
  double total = 0.0;
  for (const Gap& g : gaps) {
    const Token& lt = sentence.tokens[g.left_token];
    const Token& rt = sentence.tokens[g.right_token];
    BackoffEstimate est =
        gap_prob(g.tag, WordTagStr{lt.word, lt.tag}, WordTagStr{rt.word, rt.tag}, g.comma);
    if (est.value <= 0.0) return kLogZero;
    total += std::log(est.value);
  }
  return total;
}

double tag_distribution_term(const TaggedSentence& sentence,
                             const std::vector<std::string>& chosen_tags) {
  if (!sentence.has_distributions())
    throw std::invalid_argument(
        "tag distribution scoring requested but the sentence carries no "
        "tag distributions");
  if (chosen_tags.size() != sentence.tokens.size())
    throw std::invalid_argument("tag_distribution_term: one tag per token required");
  double total = 0.0;
  for (size_t i = 0; i < chosen_tags.size(); ++i) {
    double p = kTagProbFloor;
    for (const TagProb& tp : sentence.tag_distributions[i])
      if (tp.tag == chosen_tags[i]) {
        p = tp.prob > 0.0 ? tp.prob : kTagProbFloor;
        break;
      }
    total += std::log(p);
  }
  return total;
}

TreeScore score_tree(const Model& model, const HeadRuleTable& rules,
                     const ParseTree& tree, const ScoreConfig& cfg,
                     const TaggedSentence* sentence) {
  Analysis a = analyze(tree, rules, model.punct);
  Estimator est(model);
  TreeScore score;
  score.dependency_part =
      est.score_dependencies(a.reduced, a.sentence, a.dependencies, cfg.tag_blind);
  score.gap_part = est.score_gaps(a.sentence, a.gaps);
  if (cfg.tag_distributions) {
    if (sentence == nullptr)
      throw std::invalid_argument(
          "tag distribution scoring requires the tagged sentence");
    std::vector<std::string> chosen;
    chosen.reserve(a.sentence.tokens.size());
    for (const Token& t : a.sentence.tokens) chosen.push_back(t.tag);
    score.tag_part = tag_distribution_term(*sentence, chosen);
  }
  score.total = score.dependency_part + score.gap_part + score.tag_part;
  return score;
}

}  // namespace lexdep
