#include "lexdep/head_rules.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace lexdep {

namespace {

constexpr int kAbsent = std::numeric_limits<int>::max();

// Adapted from the Magerman/Black-style tables used by Penn Treebank
// parsers. NP uses several passes because its sub-rules scan in different
// directions.
const char* kDefaultRules = R"(DEFAULT l
ADJP l NNS QP NN $ ADVP JJ VBN VBG ADJP JJR NP JJS DT FW RBR RBS SBAR RB
ADVP r RB RBR RBS FW ADVP TO CD JJR JJ IN NP JJS NN
CONJP r CC RB IN
FRAG r
INTJ l
LST r LS :
NAC l NN NNS NNP NNPS NP NAC EX $ CD QP PRP VBG JJ JJS JJR ADJP FW
NP r POS
NP r NN NNP NNPS NNS NX JJR
NP l NP
NP r $ ADJP PRN
NP r CD
NP r JJ JJS RB QP
NP r
NX r POS
NX r NN NNP NNPS NNS NX JJR
NX l NP
NX r
PP r IN TO VBG VBN RP FW
PRN l
PRT r RP
QP l $ IN NNS NN JJ RB DT CD NCD QP JJR JJS
RRC r VP NP ADVP ADJP PP
S l TO IN VP S SBAR ADJP UCP NP
SBAR l WHNP WHPP WHADVP WHADJP IN DT S SQ SINV SBAR FRAG
SBARQ l SQ S SINV SBARQ FRAG
SINV l VBZ VBD VBP VB MD VP S SINV ADJP NP
SQ l VBZ VBD VBP VB MD VP SQ
UCP r
VP l TO VBD VBN MD VBZ VB VBG VBP VP ADJP NN NNS NP
WHADJP l CC WRB JJ ADJP
WHADVP r CC WRB
WHNP l WDT WP WP$ WHADJP WHPP WHNP
WHPP r IN TO FW
X r
)";

}  // namespace

HeadRuleTable HeadRuleTable::defaults() { return from_string(kDefaultRules); }

HeadRuleTable HeadRuleTable::from_string(const std::string& text) {
  std::istringstream in(text);
  return from_stream(in);
}

HeadRuleTable HeadRuleTable::from_stream(std::istream& in) {
  HeadRuleTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    std::string parent, dir;
    if (!(row >> parent)) continue;  // blank line
    if (parent[0] == '#') continue;
    if (!(row >> dir) || (dir != "l" && dir != "r"))
      throw ParseError("head-rule line needs 'PARENT l|r [labels...]'", lineno, 1);
    HeadRulePass pass;
    pass.left_to_right = (dir == "l");
    std::string label;
    while (row >> label) pass.labels.push_back(label);
    if (parent == "DEFAULT") {
      if (!pass.labels.empty())
        throw ParseError("DEFAULT rule takes no labels", lineno, 1);
      table.default_left_to_right_ = pass.left_to_right;
    } else {
      table.rules_[parent].push_back(std::move(pass));
    }
  }
  return table;
}

HeadRuleTable HeadRuleTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open head-rule file: " + path);
  return from_stream(in);
}

std::string HeadRuleTable::to_string() const {
  std::string out = std::string("DEFAULT ") + (default_left_to_right_ ? "l" : "r") + "\n";
  for (const auto& [parent, passes] : rules_) {
    for (const auto& pass : passes) {
      out += parent;
      out += pass.left_to_right ? " l" : " r";
      for (const auto& l : pass.labels) {
        out += " ";
        out += l;
      }
      out += "\n";
    }
  }
  return out;
}

uint64_t HeadRuleTable::hash() const {
  // FNV-1a over the canonical serialization.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : to_string()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int HeadRuleTable::head_child(const std::string& parent,
                              const std::vector<std::string>& child_labels) const {
  if (child_labels.empty())
    throw std::invalid_argument("head_child: empty child list");
  int n = static_cast<int>(child_labels.size());
  auto scan = [&](bool ltr, const std::string& want, bool any) -> int {
    for (int k = 0; k < n; ++k) {
      int i = ltr ? k : n - 1 - k;
      if (any || child_labels[i] == want) return i;
    }
    return -1;
  };
  auto it = rules_.find(parent);
  if (it != rules_.end()) {
    for (const auto& pass : it->second) {
      if (pass.labels.empty()) return scan(pass.left_to_right, "", true);
      for (const auto& want : pass.labels) {
        int i = scan(pass.left_to_right, want, false);
        if (i >= 0) return i;
      }
    }
  }
  return scan(default_left_to_right_, "", true);
}

std::pair<int, int> HeadRuleTable::priority(const std::vector<HeadRulePass>& passes,
                                            const std::string& label) const {
  for (int p = 0; p < static_cast<int>(passes.size()); ++p) {
    const auto& labels = passes[p].labels;
    if (labels.empty()) return {p, 0};  // catch-all pass matches everything
    for (int k = 0; k < static_cast<int>(labels.size()); ++k)
      if (labels[k] == label) return {p, k};
  }
  return {kAbsent, kAbsent};
}

bool HeadRuleTable::extension_keeps_head(const std::string& parent,
                                         const std::string& head_label,
                                         const std::string& new_label,
                                         bool extend_right) const {
  // The head child of a constituent is always the first occurrence, in the
  // deciding pass's scan direction, of the best-priority label present. A
  // new child therefore moves the head iff it outranks the head label, or
  // ties with it on the side the scan reaches first.
  auto it = rules_.find(parent);
  bool ltr;
  std::pair<int, int> p_new, p_head;
  if (it == rules_.end()) {
    p_new = p_head = {kAbsent, kAbsent};
    ltr = default_left_to_right_;
  } else {
    p_new = priority(it->second, new_label);
    p_head = priority(it->second, head_label);
    if (p_new.first != kAbsent)
      ltr = it->second[p_new.first].left_to_right;
    else if (p_head.first != kAbsent)
      ltr = it->second[p_head.first].left_to_right;
    else
      ltr = default_left_to_right_;
  }
  if (p_new < p_head) return false;
  if (p_new > p_head) return true;
  // Same priority (same label, or both outside the table): the scan-start
  // side wins.
  return extend_right == ltr;
}

namespace {

HeadedTree annotate(const ParseTree& tree, const HeadRuleTable& rules, int* next_leaf) {
  HeadedTree out;
  out.label = tree.label;
  if (tree.is_leaf()) {
    out.word = tree.word;
    out.begin = *next_leaf;
    out.end = *next_leaf + 1;
    out.head_token = *next_leaf;
    ++*next_leaf;
    return out;
  }
  std::vector<std::string> child_labels;
  child_labels.reserve(tree.children.size());
  for (const auto& c : tree.children) {
    out.children.push_back(annotate(c, rules, next_leaf));
    child_labels.push_back(c.label);
  }
  out.begin = out.children.front().begin;
  out.end = out.children.back().end;
  out.head_child = rules.head_child(tree.label, child_labels);
  out.head_token = out.children[out.head_child].head_token;
  return out;
}

}  // namespace

HeadedTree annotate_heads(const ParseTree& tree, const HeadRuleTable& rules) {
  int next_leaf = 0;
  return annotate(tree, rules, &next_leaf);
}

}  // namespace lexdep
