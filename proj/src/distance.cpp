#include "lexdep/distance.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace lexdep {

bool is_verb_tag(std::string_view tag) {
  return tag.size() >= 2 && tag[0] == 'V' && tag[1] == 'B';
}

uint8_t DeltaFeatures::encode() const {
  if (root) return kDeltaRoot;
  return static_cast<uint8_t>(
      (head_precedes ? 1 : 0) | (adjacent ? 2 : 0) | (verb_between ? 4 : 0) |
      (static_cast<uint8_t>(commas) << 3) | (comma_after_first ? 32 : 0) |
      (comma_before_second ? 64 : 0));
}

DeltaFeatures DeltaFeatures::root_value() {
  DeltaFeatures d;
  d.root = true;
  return d;
}

DeltaFeatures delta_from_parts(bool head_precedes, int items_between,
                               int verbs_between, int comma_count,
                               bool comma_after_first, bool comma_before_second) {
  DeltaFeatures d;
  d.head_precedes = head_precedes;
  d.adjacent = items_between == 0;
  d.verb_between = verbs_between > 0;
  d.commas = comma_count <= 0   ? CommaBucket::Zero
             : comma_count == 1 ? CommaBucket::One
             : comma_count == 2 ? CommaBucket::Two
                                : CommaBucket::Many;
  d.comma_after_first = comma_after_first;
  d.comma_before_second = comma_before_second;
  return d;
}

DeltaFeatures delta(const ReducedSentence& reduced, const TaggedSentence& sentence,
                    int j, int h, const PunctConfig& punct) {
  if (h == kRootHead) return DeltaFeatures::root_value();
  if (j == h || j < 0 || h < 0 || j >= static_cast<int>(reduced.size()) ||
      h >= static_cast<int>(reduced.size()))
    throw std::invalid_argument("delta: bad item indices");

  int lo = std::min(j, h), hi = std::max(j, h);
  int verbs = 0;
  for (int k = lo + 1; k < hi; ++k)
    if (is_verb_tag(reduced[k].tag)) ++verbs;

  const ReducedItem& first = reduced[lo];
  const ReducedItem& second = reduced[hi];
  int commas = 0;
  for (int t = first.span_end; t < second.span_begin; ++t)
    if (punct.is_comma(sentence.tokens[t].tag)) ++commas;
  bool after_first = first.span_end < second.span_begin &&
                     punct.is_comma(sentence.tokens[first.span_end].tag);
  bool before_second = second.span_begin - 1 >= first.span_end &&
                       punct.is_comma(sentence.tokens[second.span_begin - 1].tag);

  return delta_from_parts(h < j, hi - lo - 1, verbs, commas, after_first,
                          before_second);
}

DistanceStats corpus_distance_stats(const std::vector<ParseTree>& treebank,
                                    const HeadRuleTable& rules,
                                    const PunctConfig& punct) {
  uint64_t total = 0;
  uint64_t d1 = 0, d2 = 0, d5 = 0, d10 = 0;
  uint64_t v0 = 0, v1 = 0, v2 = 0;
  for (const auto& tree : treebank) {
    Analysis a = analyze(tree, rules, punct);
    for (const auto& dep : a.dependencies) {
      if (dep.head == kRootHead) continue;
      ++total;
      int dist = std::abs(dep.head - dep.modifier);
      if (dist <= 1) ++d1;
      if (dist <= 2) ++d2;
      if (dist <= 5) ++d5;
      if (dist <= 10) ++d10;
      int lo = std::min(dep.head, dep.modifier), hi = std::max(dep.head, dep.modifier);
      int verbs = 0;
      for (int k = lo + 1; k < hi; ++k)
        if (is_verb_tag(a.reduced[k].tag)) ++verbs;
      if (verbs == 0) ++v0;
      if (verbs <= 1) ++v1;
      if (verbs <= 2) ++v2;
    }
  }
  if (total == 0)
    throw std::runtime_error("distance stats: no dependencies in corpus");
  DistanceStats s;
  s.dependencies = total;
  auto pct = [&](uint64_t c) { return 100.0 * static_cast<double>(c) / total; };
  s.pct_dist_1 = pct(d1);
  s.pct_dist_le2 = pct(d2);
  s.pct_dist_le5 = pct(d5);
  s.pct_dist_le10 = pct(d10);
  s.pct_verbs_0 = pct(v0);
  s.pct_verbs_le1 = pct(v1);
  s.pct_verbs_le2 = pct(v2);
  return s;
}

std::string format_distance_stats(const DistanceStats& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "Distance      1     <=2     <=5    <=10\n"
                "Percentage %4.1f   %5.1f   %5.1f   %5.1f\n"
                "\n"
                "Verbs         0     <=1     <=2\n"
                "Percentage %4.1f   %5.1f   %5.1f\n",
                s.pct_dist_1, s.pct_dist_le2, s.pct_dist_le5, s.pct_dist_le10,
                s.pct_verbs_0, s.pct_verbs_le1, s.pct_verbs_le2);
  return buf;
}

}  // namespace lexdep
