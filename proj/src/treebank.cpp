#include "lexdep/treebank.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace lexdep {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) +
                                        ", column " + std::to_string(column) + ")"
                                  : msg),
      line_(line),
      column_(column) {}

ParseTree ParseTree::leaf(std::string tag, std::string word) {
  ParseTree t;
  t.label = std::move(tag);
  t.word = std::move(word);
  return t;
}

ParseTree ParseTree::node(std::string label, std::vector<ParseTree> children) {
  ParseTree t;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

int ParseTree::leaf_count() const {
  if (is_leaf()) return 1;
  int n = 0;
  for (const auto& c : children) n += c.leaf_count();
  return n;
}

namespace {

void collect_leaves(const ParseTree& t, std::vector<Token>* out) {
  if (t.is_leaf()) {
    out->push_back(Token{t.word, t.label, static_cast<int>(out->size())});
    return;
  }
  for (const auto& c : t.children) collect_leaves(c, out);
}

}  // namespace

std::vector<Token> ParseTree::leaves() const {
  std::vector<Token> out;
  collect_leaves(*this, &out);
  return out;
}

TaggedSentence ParseTree::to_sentence() const {
  TaggedSentence s;
  s.tokens = leaves();
  return s;
}

std::string ParseTree::to_string() const {
  if (is_leaf()) return "(" + label + " " + word + ")";
  std::string out = "(" + label;
  for (const auto& c : children) {
    out += " ";
    out += c.to_string();
  }
  out += ")";
  return out;
}

bool PunctConfig::is_comma(const std::string& tag) const {
  return std::find(comma_tags.begin(), comma_tags.end(), tag) != comma_tags.end();
}

bool PunctConfig::is_punct(const std::string& tag) const {
  return std::find(eval_punct_tags.begin(), eval_punct_tags.end(), tag) !=
         eval_punct_tags.end();
}

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }
  void skip_space() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }
  std::string read_atom() {
    std::string atom;
    while (!done() && peek() != '(' && peek() != ')' &&
           !std::isspace(static_cast<unsigned char>(peek()))) {
      atom += peek();
      advance();
    }
    return atom;
  }
};

// Raw s-expression node before normalization.
struct RawNode {
  std::string label;
  std::string word;
  bool has_word = false;
  std::vector<RawNode> children;
};

RawNode parse_node(Cursor& cur) {
  int open_line = cur.line, open_col = cur.col;
  cur.advance();  // consume '('
  cur.skip_space();
  RawNode node;
  if (!cur.done() && cur.peek() != '(' && cur.peek() != ')') {
    node.label = cur.read_atom();
  }
  while (true) {
    cur.skip_space();
    if (cur.done())
      throw ParseError("unbalanced parentheses: unexpected end of input",
                       open_line, open_col);
    char c = cur.peek();
    if (c == ')') {
      cur.advance();
      break;
    }
    if (c == '(') {
      node.children.push_back(parse_node(cur));
    } else {
      std::string atom = cur.read_atom();
      if (node.has_word || !node.children.empty())
        throw ParseError("constituent mixes words and subtrees under '" +
                             node.label + "'",
                         cur.line, cur.col);
      node.word = atom;
      node.has_word = true;
    }
  }
  if (!node.has_word && node.children.empty())
    throw ParseError("empty constituent", open_line, open_col);
  return node;
}

std::string strip_function_tags(const std::string& label) {
  // NP-SBJ -> NP, NP=2 -> NP. The leading character is kept so tags such as
  // -LRB- (which only ever appear on leaves anyway) survive.
  size_t cut = label.find_first_of("-=", 1);
  if (cut == std::string::npos) return label;
  return label.substr(0, cut);
}

// Returns false if the subtree vanished (empty element).
bool normalize(const RawNode& raw, const TreebankConfig& cfg, ParseTree* out,
               int line, int col) {
  if (raw.has_word) {
    if (raw.label.empty())
      throw ParseError("leaf '" + raw.word + "' has no tag", line, col);
    if (cfg.strip_empty_elements && raw.label == "-NONE-") return false;
    *out = ParseTree::leaf(raw.label, raw.word);
    return true;
  }
  std::vector<ParseTree> kids;
  for (const auto& c : raw.children) {
    ParseTree kid;
    if (normalize(c, cfg, &kid, line, col)) kids.push_back(std::move(kid));
  }
  if (kids.empty()) return false;
  std::string label = raw.label;
  if (cfg.strip_function_tags && !label.empty()) label = strip_function_tags(label);
  *out = ParseTree::node(std::move(label), std::move(kids));
  return true;
}

}  // namespace

std::vector<ParseTree> read_trees(std::istream& in, const TreebankConfig& cfg) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_trees(buf.str(), cfg);
}

std::vector<ParseTree> read_trees(const std::string& text, const TreebankConfig& cfg) {
  std::vector<ParseTree> trees;
  Cursor cur{text};
  while (true) {
    cur.skip_space();
    if (cur.done()) break;
    if (cur.peek() != '(')
      throw ParseError(std::string("expected '(' but found '") + cur.peek() + "'",
                       cur.line, cur.col);
    int line = cur.line, col = cur.col;
    RawNode raw = parse_node(cur);
    ParseTree tree;
    if (!normalize(raw, cfg, &tree, line, col))
      throw ParseError("tree is empty after removing empty elements", line, col);
    // Unlabeled outer bracket: strip if it wraps a single constituent,
    // otherwise give it the configured wrapper label.
    if (tree.label.empty() && !tree.is_leaf()) {
      if (tree.children.size() == 1) {
        tree = std::move(tree.children.front());
      } else if (!cfg.root_wrapper.empty()) {
        tree.label = cfg.root_wrapper;
      } else {
        throw ParseError("unlabeled constituent with several children", line, col);
      }
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

std::vector<ParseTree> read_tree_file(const std::string& path, const TreebankConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open treebank file: " + path);
  return read_trees(in, cfg);
}

ParseTree read_tree(const std::string& text, const TreebankConfig& cfg) {
  auto trees = read_trees(text, cfg);
  if (trees.size() != 1)
    throw ParseError("expected exactly one tree, found " +
                     std::to_string(trees.size()));
  return std::move(trees.front());
}

void write_trees(std::ostream& out, const std::vector<ParseTree>& trees) {
  for (const auto& t : trees) out << t.to_string() << "\n";
}

namespace {

bool parse_distribution(const std::string& spec, std::vector<TagProb>* out) {
  out->clear();
  size_t start = 0;
  while (start <= spec.size()) {
    size_t end = spec.find(',', start);
    std::string part =
        spec.substr(start, end == std::string::npos ? std::string::npos : end - start);
    size_t colon = part.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= part.size())
      return false;
    std::string tag = part.substr(0, colon);
    std::string num = part.substr(colon + 1);
    try {
      size_t used = 0;
      double p = std::stod(num, &used);
      if (used != num.size() || p < 0.0) return false;
      out->push_back(TagProb{tag, p});
    } catch (const std::exception&) {
      return false;
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return !out->empty();
}

}  // namespace

TaggedSentence read_tagged_sentence(const std::string& line) {
  TaggedSentence sent;
  std::istringstream in(line);
  std::string item;
  bool any_dist = false;
  std::vector<std::vector<TagProb>> dists;
  while (in >> item) {
    size_t slash = item.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 >= item.size())
      throw ParseError("tagged item '" + item + "' has no word/TAG separator");
    std::string word = item.substr(0, slash);
    std::string tag_part = item.substr(slash + 1);
    std::vector<TagProb> dist;
    // A tag part containing ':' may be a distribution; a bare ':' is the
    // colon POS tag itself.
    if (tag_part.find(':') != std::string::npos && parse_distribution(tag_part, &dist)) {
      double sum = 0.0;
      const TagProb* best = &dist.front();
      for (const auto& tp : dist) {
        sum += tp.prob;
        if (tp.prob > best->prob) best = &tp;
      }
      if (sum < 1.0 - 1e-6 || sum > 1.0 + 1e-6)
        throw ParseError("tag distribution for '" + word + "' sums to " +
                         std::to_string(sum) + ", expected 1");
      sent.tokens.push_back(Token{word, best->tag, sent.size()});
      dists.push_back(std::move(dist));
      any_dist = true;
    } else {
      sent.tokens.push_back(Token{word, tag_part, sent.size()});
      dists.push_back({TagProb{tag_part, 1.0}});
    }
  }
  if (sent.tokens.empty()) throw ParseError("empty tagged sentence");
  if (any_dist) sent.tag_distributions = std::move(dists);
  return sent;
}

std::vector<TaggedSentence> read_tagged_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tagged-sentence file: " + path);
  std::vector<TaggedSentence> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(read_tagged_sentence(line));
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " in " + path + ":" +
                       std::to_string(lineno));
    }
  }
  return out;
}

}  // namespace lexdep
