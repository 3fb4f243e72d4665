#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lexdep/treebank.hpp"

namespace lexdep {

// One search pass: scan the children in the given direction trying each
// priority label in turn. An empty label list matches any child.
struct HeadRulePass {
  bool left_to_right = true;
  std::vector<std::string> labels;
};

// Magerman-style head-finding table. A parent may have several passes; the
// first pass that matches decides. If nothing matches, the default direction
// picks the first (left-to-right) or last (right-to-left) child.
class HeadRuleTable {
 public:
  static HeadRuleTable defaults();
  static HeadRuleTable from_stream(std::istream& in);
  static HeadRuleTable from_file(const std::string& path);
  static HeadRuleTable from_string(const std::string& text);

  // Index of the head child; child_labels must be non-empty.
  int head_child(const std::string& parent,
                 const std::vector<std::string>& child_labels) const;

  // Whether adding a child labeled new_label at the given end of a
  // constituent keeps the current head child (labeled head_label) the head.
  // Equivalent to re-running head_child on the extended child list.
  bool extension_keeps_head(const std::string& parent, const std::string& head_label,
                            const std::string& new_label, bool extend_right) const;

  // Canonical text form (also the file format); stable across loads.
  std::string to_string() const;
  uint64_t hash() const;

 private:
  std::map<std::string, std::vector<HeadRulePass>> rules_;
  bool default_left_to_right_ = true;

  // (pass index, position in pass); absent labels sort last.
  std::pair<int, int> priority(const std::vector<HeadRulePass>& passes,
                               const std::string& label) const;
};

// A tree annotated with head children and head tokens. Token indices refer
// to the flattened leaf sequence of the original tree.
struct HeadedTree {
  std::string label;
  std::vector<HeadedTree> children;
  int head_child = -1;  // index into children; -1 for leaves
  int head_token = -1;  // leaf index of the head word
  int begin = -1;       // leaf span, half-open
  int end = -1;
  std::string word;     // leaves only

  bool is_leaf() const { return children.empty(); }
};

HeadedTree annotate_heads(const ParseTree& tree, const HeadRuleTable& rules);

}  // namespace lexdep
