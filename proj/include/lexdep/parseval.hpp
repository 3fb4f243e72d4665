#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lexdep/treebank.hpp"

namespace lexdep {

struct EvalOptions {
  PunctConfig punct;
  bool collapse_advp_prt = false;  // score ADVP and PRT as the same label
  bool include_root = true;        // count the sentence-spanning root constituent
  std::vector<int> length_cutoffs = {40, 100};
};

struct EvalBucket {
  uint64_t sentences = 0;
  uint64_t gold_constituents = 0;
  uint64_t test_constituents = 0;
  uint64_t matched = 0;
  uint64_t crossing = 0;
  uint64_t zero_crossing_sentences = 0;
  uint64_t le2_crossing_sentences = 0;

  double labeled_recall() const;     // percent
  double labeled_precision() const;  // percent
  double crossing_per_sentence() const;
  double pct_zero_crossing() const;
  double pct_le2_crossing() const;
};

struct EvalReport {
  EvalBucket all;
  std::map<int, EvalBucket> by_cutoff;  // sentence length (tokens) <= cutoff
};

// PARSEVAL scoring of test trees against gold trees. Constituents are
// (label, span) pairs with punctuation-tagged tokens removed from spans;
// sentences must agree on their word sequences after that removal.
EvalReport evaluate(const std::vector<ParseTree>& gold,
                    const std::vector<ParseTree>& test,
                    const EvalOptions& opts = {});

std::string format_report(const EvalReport& report);
std::string machine_rows(const EvalReport& report);

}  // namespace lexdep
