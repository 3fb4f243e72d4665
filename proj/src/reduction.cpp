#include "lexdep/reduction.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexdep {

char gap_tag_char(GapTag t) {
  switch (t) {
    case GapTag::Start: return 'S';
    case GapTag::Continue: return 'C';
    case GapTag::End: return 'E';
    case GapTag::Between: return 'B';
    case GapTag::Null: return 'N';
  }
  return '?';
}

namespace {

bool has_np_descendant(const HeadedTree& t) {
  for (const auto& c : t.children) {
    if (!c.is_leaf() && (c.label == "NP" || has_np_descendant(c))) return true;
  }
  return false;
}

void collect_base_nps(const HeadedTree& t, std::vector<BaseNP>* out) {
  if (t.is_leaf()) return;
  if (t.label == "NP" && !has_np_descendant(t)) {
    out->push_back(BaseNP{t.begin, t.end, t.head_token});
    return;
  }
  for (const auto& c : t.children) collect_base_nps(c, out);
}

}  // namespace

std::vector<BaseNP> extract_base_nps(const HeadedTree& tree) {
  std::vector<BaseNP> out;
  collect_base_nps(tree, &out);
  return out;
}

BaseNP make_base_np(const TaggedSentence& sentence, int begin, int end,
                    const HeadRuleTable& rules) {
  if (begin < 0 || end > sentence.size() || begin >= end)
    throw std::invalid_argument("make_base_np: bad span");
  std::vector<std::string> tags;
  tags.reserve(end - begin);
  for (int i = begin; i < end; ++i) tags.push_back(sentence.tokens[i].tag);
  int head = begin + rules.head_child("NP", tags);
  return BaseNP{begin, end, head};
}

ReducedSentence reduce(const TaggedSentence& sentence,
                       const std::vector<BaseNP>& base_nps,
                       const PunctConfig& punct) {
  std::vector<const BaseNP*> covering(sentence.tokens.size(), nullptr);
  for (const auto& np : base_nps) {
    if (np.begin < 0 || np.end > sentence.size() || np.begin >= np.end)
      throw std::invalid_argument("reduce: baseNP span outside sentence");
    for (int i = np.begin; i < np.end; ++i) covering[i] = &np;
  }
  ReducedSentence out;
  for (int i = 0; i < sentence.size(); ++i) {
    const Token& tok = sentence.tokens[i];
    if (const BaseNP* np = covering[i]) {
      if (i == np->begin) {
        const Token& head = sentence.tokens[np->head_token];
        out.push_back(ReducedItem{head.word, head.tag, np->head_token, np->begin,
                                  np->end, true});
      }
      continue;
    }
    if (punct.is_punct(tok.tag)) continue;
    out.push_back(ReducedItem{tok.word, tok.tag, i, i, i + 1, false});
  }
  return out;
}

namespace {

void collect_deps(const HeadedTree& t, const std::vector<int>& token_to_item,
                  const ReducedSentence& reduced, const std::vector<int>& covering_np,
                  const PunctConfig& punct, std::vector<Dependency>* out) {
  if (!t.is_leaf() && t.children.size() >= 2) {
    const HeadedTree& head_child = t.children[t.head_child];
    int head_item = token_to_item[head_child.head_token];
    for (int i = 0; i < static_cast<int>(t.children.size()); ++i) {
      if (i == t.head_child) continue;
      const HeadedTree& mod = t.children[i];
      if (mod.is_leaf() && punct.is_punct(mod.label)) continue;
      int mod_item = token_to_item[mod.head_token];
      if (mod_item < 0) {
        // Structure entirely inside a baseNP contributes no dependencies.
        int np = covering_np[mod.head_token];
        bool inside = np >= 0 && reduced[np].span_begin <= mod.begin &&
                      mod.end <= reduced[np].span_end;
        if (inside) continue;
        throw std::runtime_error("dependency extraction: modifier head '" +
                                 mod.word + "' is a non-head word inside a baseNP");
      }
      if (head_item < 0)
        throw std::runtime_error(
            "dependency extraction: head child's head word is a non-head word "
            "inside a baseNP");
      out->push_back(Dependency{mod_item, head_item,
                                RelationTriple{mod.label, t.label, head_child.label}});
    }
  }
  for (const auto& c : t.children)
    collect_deps(c, token_to_item, reduced, covering_np, punct, out);
}

}  // namespace

std::vector<Dependency> extract_dependencies(const HeadedTree& tree,
                                             const ReducedSentence& reduced,
                                             const PunctConfig& punct) {
  int n = tree.end;
  std::vector<int> token_to_item(n, -1);
  std::vector<int> covering_np(n, -1);
  for (int j = 0; j < static_cast<int>(reduced.size()); ++j) {
    token_to_item[reduced[j].head_token] = j;
    if (reduced[j].is_base_np)
      for (int i = reduced[j].span_begin; i < reduced[j].span_end; ++i)
        covering_np[i] = j;
  }
  std::vector<Dependency> deps;
  collect_deps(tree, token_to_item, reduced, covering_np, punct, &deps);

  int root_item = token_to_item[tree.head_token];
  if (root_item < 0)
    throw std::runtime_error("dependency extraction: sentence head is a "
                             "non-head word inside a baseNP");
  deps.push_back(Dependency{root_item, kRootHead,
                            RelationTriple{kRootMarker, tree.label, kRootMarker}});

  // One dependency per reduced item, ordered by modifier.
  std::vector<Dependency> by_modifier(reduced.size());
  std::vector<bool> seen(reduced.size(), false);
  for (auto& d : deps) {
    if (seen[d.modifier])
      throw std::runtime_error("dependency extraction: reduced item " +
                               std::to_string(d.modifier) +
                               " modifies two heads");
    seen[d.modifier] = true;
    by_modifier[d.modifier] = std::move(d);
  }
  for (size_t j = 0; j < reduced.size(); ++j)
    if (!seen[j])
      throw std::runtime_error("dependency extraction: reduced item " +
                               std::to_string(j) + " has no head");
  return by_modifier;
}

std::vector<Gap> extract_gap_tags(const TaggedSentence& sentence,
                                  const std::vector<BaseNP>& base_nps,
                                  const PunctConfig& punct) {
  std::vector<int> covering(sentence.tokens.size(), -1);
  for (int k = 0; k < static_cast<int>(base_nps.size()); ++k)
    for (int i = base_nps[k].begin; i < base_nps[k].end; ++i) covering[i] = k;

  std::vector<Gap> gaps;
  int prev = -1;
  for (int i = 0; i < sentence.size(); ++i) {
    if (punct.is_punct(sentence.tokens[i].tag)) continue;
    if (prev >= 0) {
      Gap g;
      g.left_token = prev;
      g.right_token = i;
      for (int k = prev + 1; k < i; ++k)
        if (punct.is_comma(sentence.tokens[k].tag)) g.comma = true;
      int a = covering[prev], b = covering[i];
      if (a >= 0 && b >= 0)
        g.tag = (a == b) ? GapTag::Continue : GapTag::Between;
      else if (a >= 0)
        g.tag = GapTag::End;
      else if (b >= 0)
        g.tag = GapTag::Start;
      else
        g.tag = GapTag::Null;
      gaps.push_back(g);
    }
    prev = i;
  }
  return gaps;
}

std::vector<BaseNP> decode_gap_tags(const TaggedSentence& sentence,
                                    const std::vector<Gap>& gaps,
                                    const PunctConfig& punct) {
  std::vector<int> words;
  for (int i = 0; i < sentence.size(); ++i)
    if (!punct.is_punct(sentence.tokens[i].tag)) words.push_back(i);
  if (words.empty()) return {};
  if (gaps.size() + 1 != words.size())
    throw std::invalid_argument("decode_gap_tags: gap count does not match");

  std::vector<BaseNP> out;
  int open = -1;  // word-list index where the current baseNP started
  auto close = [&](int last_word_pos) {
    out.push_back(BaseNP{words[open], words[last_word_pos] + 1, -1});
    open = -1;
  };
  for (size_t g = 0; g < gaps.size(); ++g) {
    switch (gaps[g].tag) {
      case GapTag::Start:
        if (open >= 0) throw std::invalid_argument("decode_gap_tags: S inside baseNP");
        open = static_cast<int>(g) + 1;
        break;
      case GapTag::Continue:
        if (open < 0) open = static_cast<int>(g);  // baseNP starting at the first word
        break;
      case GapTag::End:
        if (open < 0) open = static_cast<int>(g);
        close(static_cast<int>(g));
        break;
      case GapTag::Between:
        if (open < 0) open = static_cast<int>(g);
        close(static_cast<int>(g));
        open = static_cast<int>(g) + 1;
        break;
      case GapTag::Null:
        if (open >= 0) throw std::invalid_argument("decode_gap_tags: N inside baseNP");
        break;
    }
  }
  if (open >= 0) close(static_cast<int>(words.size()) - 1);
  return out;
}

Analysis analyze(const ParseTree& tree, const HeadRuleTable& rules,
                 const PunctConfig& punct) {
  Analysis a;
  a.sentence = tree.to_sentence();
  a.headed = annotate_heads(tree, rules);
  a.base_nps = extract_base_nps(a.headed);
  a.reduced = reduce(a.sentence, a.base_nps, punct);
  a.dependencies = extract_dependencies(a.headed, a.reduced, punct);
  a.gaps = extract_gap_tags(a.sentence, a.base_nps, punct);
  a.root_label = tree.label;
  return a;
}

std::string format_analysis(const Analysis& a) {
  std::string out = "B = {";
  for (size_t k = 0; k < a.base_nps.size(); ++k) {
    if (k) out += ", ";
    out += "[";
    for (int i = a.base_nps[k].begin; i < a.base_nps[k].end; ++i) {
      if (i > a.base_nps[k].begin) out += " ";
      out += a.sentence.tokens[i].word;
    }
    out += "]";
  }
  out += "}\nD = {";
  for (size_t j = 0; j < a.dependencies.size(); ++j) {
    const Dependency& d = a.dependencies[j];
    if (j) out += ", ";
    out += a.reduced[d.modifier].word;
    out += " -> ";
    out += d.head == kRootHead ? "ROOT" : a.reduced[d.head].word;
    out += " <";
    if (d.head == kRootHead) {
      out += d.relation.parent;
    } else {
      out += d.relation.modifier + "," + d.relation.parent + "," + d.relation.head_child;
    }
    out += ">";
  }
  out += "}\ngaps = ";
  for (size_t g = 0; g < a.gaps.size(); ++g) {
    if (g) out += " ";
    out += gap_tag_char(a.gaps[g].tag);
    if (a.gaps[g].comma) out += ",";
  }
  out += "\n";
  return out;
}

}  // namespace lexdep
