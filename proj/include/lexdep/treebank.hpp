#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexdep {

// Raised by the tree and tagged-sentence readers. line/column are 1-based;
// 0 means "not applicable" (e.g. single-line input).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Token {
  std::string word;
  std::string tag;
  int index = -1;  // 0-based position in the sentence
};

struct TagProb {
  std::string tag;
  double prob = 0.0;
};

struct TaggedSentence {
  std::vector<Token> tokens;
  // Per-token tag distributions, parallel to tokens. Empty unless the input
  // used the extended word/TAG1:p1,TAG2:p2 format.
  std::vector<std::vector<TagProb>> tag_distributions;

  bool has_distributions() const { return !tag_distributions.empty(); }
  int size() const { return static_cast<int>(tokens.size()); }
};

// A constituent tree. Leaves are (tag, word) pairs with label == POS tag;
// internal nodes have a non-terminal label and at least one child.
struct ParseTree {
  std::string label;
  std::string word;  // leaves only
  std::vector<ParseTree> children;

  ParseTree() = default;
  static ParseTree leaf(std::string tag, std::string word);
  static ParseTree node(std::string label, std::vector<ParseTree> children);

  bool is_leaf() const { return children.empty(); }
  int leaf_count() const;
  // Leaf tokens left to right, indices assigned 0..n-1.
  std::vector<Token> leaves() const;
  TaggedSentence to_sentence() const;
  std::string to_string() const;

  bool operator==(const ParseTree&) const = default;
};

struct TreebankConfig {
  // Label given to an unlabeled outer bracket with several children; an
  // unlabeled bracket with a single child is stripped.
  std::string root_wrapper = "TOP";
  // Strip function-tag suffixes from non-terminal labels (NP-SBJ -> NP).
  bool strip_function_tags = true;
  // Remove -NONE- leaves (traces / empty elements) and prune emptied nodes.
  bool strip_empty_elements = true;
};

struct PunctConfig {
  // Tags treated as "commas" for the distance features and gap comma flags.
  std::vector<std::string> comma_tags = {",", ":"};
  // Tags removed when building the reduced sentence and ignored by the
  // evaluator. Includes the sentence-final period tag.
  std::vector<std::string> eval_punct_tags = {",", ":", "``", "''", "."};

  bool is_comma(const std::string& tag) const;
  bool is_punct(const std::string& tag) const;
};

std::vector<ParseTree> read_trees(std::istream& in, const TreebankConfig& cfg = {});
std::vector<ParseTree> read_trees(const std::string& text, const TreebankConfig& cfg = {});
std::vector<ParseTree> read_tree_file(const std::string& path, const TreebankConfig& cfg = {});
ParseTree read_tree(const std::string& text, const TreebankConfig& cfg = {});

void write_trees(std::ostream& out, const std::vector<ParseTree>& trees);

// Parses one "word/TAG word/TAG ..." line. The extended form
// word/TAG1:p1,TAG2:p2 attaches a tag distribution; the 1-best tag becomes
// the token's tag.
TaggedSentence read_tagged_sentence(const std::string& line);
std::vector<TaggedSentence> read_tagged_file(const std::string& path);

}  // namespace lexdep
