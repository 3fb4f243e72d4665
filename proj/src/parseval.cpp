#include "lexdep/parseval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

namespace lexdep {

namespace {

double pct(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double EvalBucket::labeled_recall() const { return pct(matched, gold_constituents); }
double EvalBucket::labeled_precision() const { return pct(matched, test_constituents); }
double EvalBucket::crossing_per_sentence() const {
  return sentences == 0 ? 0.0 : static_cast<double>(crossing) / sentences;
}
double EvalBucket::pct_zero_crossing() const {
  return pct(zero_crossing_sentences, sentences);
}
double EvalBucket::pct_le2_crossing() const { return pct(le2_crossing_sentences, sentences); }

namespace {

struct Constituent {
  std::string label;
  int begin;
  int end;
  bool operator<(const Constituent& o) const {
    return std::tie(begin, end, label) < std::tie(o.begin, o.end, o.label);
  }
  bool operator==(const Constituent&) const = default;
};

// Collects (label, span) pairs over word positions (punctuation removed).
// Returns the number of words spanned by the subtree.
int collect(const ParseTree& t, const EvalOptions& opts, int* next_word, bool is_root,
            std::vector<Constituent>* out) {
  if (t.is_leaf()) {
    if (opts.punct.is_punct(t.label)) return 0;
    ++*next_word;
    return 1;
  }
  int begin = *next_word;
  int width = 0;
  for (const auto& c : t.children) width += collect(c, opts, next_word, false, out);
  if (width == 0) return 0;  // punctuation-only constituent
  if (is_root && !opts.include_root) return width;
  std::string label = t.label;
  if (opts.collapse_advp_prt && label == "PRT") label = "ADVP";
  out->push_back(Constituent{std::move(label), begin, begin + width});
  return width;
}

std::vector<std::string> word_sequence(const ParseTree& t, const PunctConfig& punct) {
  std::vector<std::string> words;
  for (const Token& tok : t.leaves())
    if (!punct.is_punct(tok.tag)) words.push_back(tok.word);
  return words;
}

bool spans_cross(int b1, int e1, int b2, int e2) {
  return (b1 < b2 && b2 < e1 && e1 < e2) || (b2 < b1 && b1 < e2 && e2 < e1);
}

void score_pair(const ParseTree& gold, const ParseTree& test, const EvalOptions& opts,
                int sentence_index, EvalBucket* bucket) {
  if (word_sequence(gold, opts.punct) != word_sequence(test, opts.punct))
    throw std::runtime_error(
        "evaluate: gold and test word sequences differ at sentence " +
        std::to_string(sentence_index + 1) + " (after punctuation removal)");

  std::vector<Constituent> g, t;
  int next = 0;
  collect(gold, opts, &next, true, &g);
  next = 0;
  collect(test, opts, &next, true, &t);

  // Matching with multiplicity: duplicates match at most once each.
  std::map<Constituent, int> gold_count;
  for (const auto& c : g) ++gold_count[c];
  uint64_t matched = 0;
  for (const auto& c : t) {
    auto it = gold_count.find(c);
    if (it != gold_count.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }

  uint64_t crossing = 0;
  for (const auto& tc : t) {
    for (const auto& gc : g) {
      if (spans_cross(tc.begin, tc.end, gc.begin, gc.end)) {
        ++crossing;
        break;  // counted once per offending test constituent
      }
    }
  }

  bucket->sentences += 1;
  bucket->gold_constituents += g.size();
  bucket->test_constituents += t.size();
  bucket->matched += matched;
  bucket->crossing += crossing;
  if (crossing == 0) ++bucket->zero_crossing_sentences;
  if (crossing <= 2) ++bucket->le2_crossing_sentences;
}

}  // namespace

EvalReport evaluate(const std::vector<ParseTree>& gold,
                    const std::vector<ParseTree>& test, const EvalOptions& opts) {
  if (gold.size() != test.size())
    throw std::invalid_argument("evaluate: gold and test tree counts differ (" +
                                std::to_string(gold.size()) + " vs " +
                                std::to_string(test.size()) + ")");
  EvalReport report;
  for (int cutoff : opts.length_cutoffs) report.by_cutoff[cutoff];
  for (size_t i = 0; i < gold.size(); ++i) {
    EvalBucket bucket;
    score_pair(gold[i], test[i], opts, static_cast<int>(i), &bucket);
    auto add = [&](EvalBucket& dst) {
      dst.sentences += bucket.sentences;
      dst.gold_constituents += bucket.gold_constituents;
      dst.test_constituents += bucket.test_constituents;
      dst.matched += bucket.matched;
      dst.crossing += bucket.crossing;
      dst.zero_crossing_sentences += bucket.zero_crossing_sentences;
      dst.le2_crossing_sentences += bucket.le2_crossing_sentences;
    };
    add(report.all);
    int length = gold[i].leaf_count();
    for (auto& [cutoff, dst] : report.by_cutoff)
      if (length <= cutoff) add(dst);
  }
  return report;
}

std::string format_report(const EvalReport& report) {
  std::string out =
      "Bucket         Sents      LR      LP     CBs   0 CBs  <=2 CBs\n";
  char line[256];
  auto row = [&](const std::string& name, const EvalBucket& b) {
    std::snprintf(line, sizeof(line), "%-12s %7llu  %5.1f%%  %5.1f%%   %5.2f   %5.1f%%   %5.1f%%\n",
                  name.c_str(), static_cast<unsigned long long>(b.sentences),
                  b.labeled_recall(), b.labeled_precision(), b.crossing_per_sentence(),
                  b.pct_zero_crossing(), b.pct_le2_crossing());
    out += line;
  };
  for (const auto& [cutoff, bucket] : report.by_cutoff)
    row("<=" + std::to_string(cutoff) + " words", bucket);
  row("all", report.all);
  return out;
}

std::string machine_rows(const EvalReport& report) {
  std::string out;
  char line[256];
  auto row = [&](const std::string& name, const EvalBucket& b) {
    std::snprintf(line, sizeof(line),
                  "%s\t%llu\t%.4f\t%.4f\t%.4f\t%.4f\t%.4f\n", name.c_str(),
                  static_cast<unsigned long long>(b.sentences), b.labeled_recall(),
                  b.labeled_precision(), b.crossing_per_sentence(),
                  b.pct_zero_crossing(), b.pct_le2_crossing());
    out += line;
  };
  for (const auto& [cutoff, bucket] : report.by_cutoff)
    row("le" + std::to_string(cutoff), bucket);
  row("all", report.all);
  return out;
}

}  // namespace lexdep
