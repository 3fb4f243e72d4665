#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lexdep/reduction.hpp"

namespace lexdep {

enum class CommaBucket : uint8_t { Zero = 0, One = 1, Two = 2, Many = 3 };

// The six distance questions conditioning every dependency probability,
// plus the reserved value used for root attachment.
struct DeltaFeatures {
  bool root = false;
  bool head_precedes = false;       // Q1: head before the modifier in surface order
  bool adjacent = false;            // Q2: neighbours in the reduced sentence
  bool verb_between = false;        // Q3: a verb-tagged reduced item intervenes
  CommaBucket commas = CommaBucket::Zero;  // Q4
  bool comma_after_first = false;   // Q5
  bool comma_before_second = false; // Q6

  // 0..127 for the regular values, 128 for root.
  uint8_t encode() const;
  static DeltaFeatures root_value();
  bool operator==(const DeltaFeatures&) const = default;
};

constexpr uint8_t kDeltaRoot = 128;

bool is_verb_tag(std::string_view tag);  // tags beginning "VB"

// Core constructor shared by the training-side and parser-side paths.
DeltaFeatures delta_from_parts(bool head_precedes, int items_between,
                               int verbs_between, int comma_count,
                               bool comma_after_first, bool comma_before_second);

// Distance features for modifier item j and head item h (kRootHead for the
// root). Comma questions look at original tokens between the two items'
// spans; adjacency and the verb question use reduced positions.
DeltaFeatures delta(const ReducedSentence& reduced, const TaggedSentence& sentence,
                    int j, int h, const PunctConfig& punct);

// Corpus-level dependency locality report.
struct DistanceStats {
  uint64_t dependencies = 0;
  // Cumulative percentages at reduced distance 1, <=2, <=5, <=10.
  double pct_dist_1 = 0, pct_dist_le2 = 0, pct_dist_le5 = 0, pct_dist_le10 = 0;
  // Cumulative percentages at 0, <=1, <=2 intervening verbs.
  double pct_verbs_0 = 0, pct_verbs_le1 = 0, pct_verbs_le2 = 0;
};

DistanceStats corpus_distance_stats(const std::vector<ParseTree>& treebank,
                                    const HeadRuleTable& rules,
                                    const PunctConfig& punct);

std::string format_distance_stats(const DistanceStats& s);

}  // namespace lexdep
