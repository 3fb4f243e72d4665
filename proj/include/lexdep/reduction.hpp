#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexdep/head_rules.hpp"
#include "lexdep/treebank.hpp"

namespace lexdep {

// Reserved marker for the root pseudo-token; the \x01 prefix keeps it out of
// any real vocabulary.
inline const std::string kRootMarker = "\x01ROOT";
constexpr int kRootHead = -1;

// A non-recursive NP over original token positions, half-open.
struct BaseNP {
  int begin = 0;
  int end = 0;
  int head_token = -1;
};

struct ReducedItem {
  std::string word;  // head word of the baseNP, or the token itself
  std::string tag;
  int head_token = -1;  // original index of the head token
  int span_begin = 0;   // original token range covered
  int span_end = 0;
  bool is_base_np = false;
};
using ReducedSentence = std::vector<ReducedItem>;

struct RelationTriple {
  std::string modifier;
  std::string parent;
  std::string head_child;
  bool operator==(const RelationTriple&) const = default;
};

// AF(modifier) = (head, relation); head == kRootHead marks the sentential
// head, whose relation is (marker, root label, marker).
struct Dependency {
  int modifier = -1;  // reduced index
  int head = -1;      // reduced index or kRootHead
  RelationTriple relation;
  bool operator==(const Dependency&) const = default;
};

enum class GapTag : uint8_t { Start, Continue, End, Between, Null };
char gap_tag_char(GapTag t);

// The gap between two consecutive non-punctuation tokens.
struct Gap {
  GapTag tag = GapTag::Null;
  int left_token = -1;  // original indices of the flanking words
  int right_token = -1;
  bool comma = false;  // a comma-tagged token lies between them
};

std::vector<BaseNP> extract_base_nps(const HeadedTree& tree);

// Head of a flat NP hypothesized over tokens [begin, end), found with the
// same rules used for treebank baseNPs.
BaseNP make_base_np(const TaggedSentence& sentence, int begin, int end,
                    const HeadRuleTable& rules);

ReducedSentence reduce(const TaggedSentence& sentence,
                       const std::vector<BaseNP>& base_nps,
                       const PunctConfig& punct);

std::vector<Dependency> extract_dependencies(const HeadedTree& tree,
                                             const ReducedSentence& reduced,
                                             const PunctConfig& punct);

std::vector<Gap> extract_gap_tags(const TaggedSentence& sentence,
                                  const std::vector<BaseNP>& base_nps,
                                  const PunctConfig& punct);

// Inverse of extract_gap_tags: reconstructs the baseNP spans (without heads)
// from a gap sequence.
std::vector<BaseNP> decode_gap_tags(const TaggedSentence& sentence,
                                    const std::vector<Gap>& gaps,
                                    const PunctConfig& punct);

// Everything the model needs from one gold tree.
struct Analysis {
  TaggedSentence sentence;
  HeadedTree headed;
  std::vector<BaseNP> base_nps;
  ReducedSentence reduced;
  std::vector<Dependency> dependencies;  // one per reduced item, by modifier
  std::vector<Gap> gaps;
  std::string root_label;
};

Analysis analyze(const ParseTree& tree, const HeadRuleTable& rules,
                 const PunctConfig& punct);

// Figure-style textual dump of the baseNP set and dependency set.
std::string format_analysis(const Analysis& a);

}  // namespace lexdep
