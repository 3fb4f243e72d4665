#include "support/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

namespace lexdep::testing {

namespace {

struct State {
  uint32_t label = 0;
  uint32_t head_child_label = 0;
  uint32_t head_tag = 0;
  int head_token = -1;
  int head_item_begin = 0;
  int head_item_end = 0;
  int items_left = 0;
  int items_right = 0;
  int verbs_left = 0;
  int verbs_right = 0;
  bool left_in_np = false;
  bool right_in_np = false;

  auto tie() const {
    return std::tie(label, head_child_label, head_tag, head_token, head_item_begin,
                    head_item_end, items_left, items_right, verbs_left, verbs_right,
                    left_in_np, right_in_np);
  }
  bool operator<(const State& o) const { return tie() < o.tie(); }
};

struct Entry {
  double score = kLogZero;
  ParseTree tree;
  std::string serial;
};

using StateMap = std::map<State, Entry>;

class Enumerator {
 public:
  Enumerator(const Model& model, const HeadRuleTable& rules,
             const TaggedSentence& sentence, const ParserConfig& cfg)
      : model_(model), rules_(rules), cfg_(cfg), est_(model), sent_(sentence) {
    int commas = 0;
    for (int t = 0; t < sent_.size(); ++t) {
      comma_prefix_.push_back(commas);
      if (model_.punct.is_comma(sent_.tokens[t].tag)) ++commas;
      if (!model_.punct.is_punct(sent_.tokens[t].tag)) words_.push_back(t);
    }
    comma_prefix_.push_back(commas);
    for (uint32_t id = 0; id < model_.triple_count(); ++id) {
      auto t = model_.triple(id);
      if (t[0] != kRootId || t[2] != kRootId) parent_labels_.push_back(t[1]);
    }
    std::sort(parent_labels_.begin(), parent_labels_.end());
    parent_labels_.erase(std::unique(parent_labels_.begin(), parent_labels_.end()),
                         parent_labels_.end());
    memo_.resize((words_.size() + 1) * (words_.size() + 1));
    done_.resize(memo_.size(), false);
  }

  int word_count() const { return static_cast<int>(words_.size()); }

  std::optional<OracleResult> best_root() {
    const StateMap& full = solve(0, word_count());
    std::optional<OracleResult> best;
    std::string best_serial;
    for (const auto& [state, entry] : full) {
      auto rel = model_.lookup_triple(kRootId, state.label, kRootId);
      if (!rel) continue;
      BackoffEstimate root = est_.dependency_prob(
          *rel, WordTag{word_id(state.head_token), state.head_tag},
          Estimator::root_word_tag(), kDeltaRoot, cfg_.tag_blind);
      if (root.value <= 0.0) continue;
      double total = entry.score + std::log(root.value);
      if (!best || score_better(total, entry.serial, best->log_score, best_serial)) {
        best = OracleResult{entry.tree, total};
        best_serial = entry.serial;
      }
    }
    return best;
  }

 private:
  const Model& model_;
  const HeadRuleTable& rules_;
  const ParserConfig& cfg_;
  Estimator est_;
  const TaggedSentence& sent_;
  std::vector<int> words_;
  std::vector<int> comma_prefix_;
  std::vector<uint32_t> parent_labels_;
  std::vector<StateMap> memo_;
  std::vector<bool> done_;

  uint32_t word_id(int token) const {
    auto id = model_.words.lookup(sent_.tokens[token].word);
    return id ? *id : kNoField;
  }
  uint32_t token_tag_id(int token) const {
    auto id = model_.tags.lookup(sent_.tokens[token].tag);
    return id ? *id : kNoField;
  }
  int commas_between(int tok_begin, int tok_end) const {
    if (tok_end <= tok_begin) return 0;
    return comma_prefix_[tok_end] - comma_prefix_[tok_begin];
  }
  bool comma_at(int tok) const {
    return tok >= 0 && tok < sent_.size() &&
           model_.punct.is_comma(sent_.tokens[tok].tag);
  }

  // Last word of the span (word positions) ends directly before a comma or
  // at the end of the sentence.
  bool ends_ok(int span_end_word) const {
    int last_tok = words_[span_end_word - 1];
    if (last_tok + 1 >= sent_.size()) return true;
    if (comma_at(last_tok + 1)) return true;
    for (int t = last_tok + 1; t < sent_.size(); ++t)
      if (!model_.punct.is_punct(sent_.tokens[t].tag)) return false;
    return true;
  }

  void offer(StateMap* map, const State& state, double score, ParseTree tree) {
    std::string serial = tree.to_string();
    auto it = map->find(state);
    if (it == map->end()) {
      (*map)[state] = Entry{score, std::move(tree), std::move(serial)};
      return;
    }
    if (score_better(score, serial, it->second.score, it->second.serial))
      it->second = Entry{score, std::move(tree), std::move(serial)};
  }

  void seed(int i, int j, StateMap* map) {
    if (j - i == 1) {
      const Token& tok = sent_.tokens[words_[i]];
      auto tid = model_.tags.lookup(tok.tag);
      auto lid = model_.labels.lookup(tok.tag);
      if (tid && lid) {
        State s;
        s.label = *lid;
        s.head_child_label = *lid;
        s.head_tag = *tid;
        s.head_token = words_[i];
        s.head_item_begin = words_[i];
        s.head_item_end = words_[i] + 1;
        offer(map, s, 0.0, ParseTree::leaf(tok.tag, tok.word));
      }
    }
    auto np_label = model_.labels.lookup(cfg_.base_np_label);
    if (!np_label) return;
    double score = 0.0;
    for (int k = i; k + 1 < j; ++k) {
      int lt = words_[k], rt = words_[k + 1];
      BackoffEstimate g = est_.gap_prob(
          GapTag::Continue, WordTag{word_id(lt), token_tag_id(lt)},
          WordTag{word_id(rt), token_tag_id(rt)}, commas_between(lt + 1, rt) > 0);
      if (g.value <= 0.0) return;
      score += std::log(g.value);
    }
    std::vector<std::string> tags;
    for (int k = i; k < j; ++k) tags.push_back(sent_.tokens[words_[k]].tag);
    int head_pos = i + rules_.head_child(cfg_.base_np_label, tags);

    State s;
    s.label = *np_label;
    s.head_child_label = *np_label;
    s.head_tag = token_tag_id(words_[head_pos]);
    s.head_token = words_[head_pos];
    s.head_item_begin = words_[i];
    s.head_item_end = words_[j - 1] + 1;
    s.left_in_np = s.right_in_np = true;
    std::vector<ParseTree> kids;
    for (int tok = words_[i]; tok <= words_[j - 1]; ++tok)
      kids.push_back(ParseTree::leaf(sent_.tokens[tok].tag, sent_.tokens[tok].word));
    offer(map, s, score, ParseTree::node(cfg_.base_np_label, std::move(kids)));
  }

  int total_items(const State& s) const { return s.items_left + s.items_right + 1; }
  int total_verbs(const State& s) const {
    bool head_verb = s.head_tag != kNoField && is_verb_tag(model_.tags.str(s.head_tag));
    return s.verbs_left + s.verbs_right + (head_verb ? 1 : 0);
  }

  void try_composition(const std::vector<int>& bounds, StateMap* map);

  void enumerate_compositions(int i, int j, std::vector<int>& bounds, StateMap* map) {
    int last = bounds.back();
    for (int s = last + 1; s <= j; ++s) {
      if (s < j || bounds.size() >= 2) {  // at least two parts overall
        bounds.push_back(s);
        if (s == j)
          try_composition(bounds, map);
        else
          enumerate_compositions(i, j, bounds, map);
        bounds.pop_back();
      }
    }
  }

  const StateMap& solve(int i, int j) {
    int idx = i * (word_count() + 1) + j;
    if (done_[idx]) return memo_[idx];
    done_[idx] = true;
    StateMap& map = memo_[idx];
    if (j - i >= 2) {
      std::vector<int> bounds{i};
      enumerate_compositions(i, j, bounds, &map);
    }
    seed(i, j, &map);
    return memo_[idx];
  }
};

void Enumerator::try_composition(const std::vector<int>& bounds, StateMap* map) {
  int parts = static_cast<int>(bounds.size()) - 1;
  std::vector<const StateMap*> part_states(parts);
  for (int p = 0; p < parts; ++p) {
    part_states[p] = &solve(bounds[p], bounds[p + 1]);
    if (part_states[p]->empty()) return;
  }

  struct Junction {
    bool comma = false;
    int left_tok = 0, right_tok = 0;
  };
  std::vector<Junction> junctions(parts - 1);
  for (int p = 0; p + 1 < parts; ++p) {
    int lt = words_[bounds[p + 1] - 1], rt = words_[bounds[p + 1]];
    junctions[p] = {commas_between(lt + 1, rt) > 0, lt, rt};
  }

  std::vector<StateMap::const_iterator> pick(parts);

  std::function<void(int)> rec = [&](int p) {
    if (p < parts) {
      for (auto it = part_states[p]->begin(); it != part_states[p]->end(); ++it) {
        pick[p] = it;
        rec(p + 1);
      }
      return;
    }

    double child_score = 0.0;
    for (int q = 0; q < parts; ++q) child_score += pick[q]->second.score;

    double gap_score = 0.0;
    for (int q = 0; q + 1 < parts; ++q) {
      GapTag tag = junction_gap_tag(pick[q]->first.right_in_np,
                                    pick[q + 1]->first.left_in_np);
      BackoffEstimate g = est_.gap_prob(
          tag,
          WordTag{word_id(junctions[q].left_tok), token_tag_id(junctions[q].left_tok)},
          WordTag{word_id(junctions[q].right_tok),
                  token_tag_id(junctions[q].right_tok)},
          junctions[q].comma);
      if (g.value <= 0.0) return;
      gap_score += std::log(g.value);
    }

    std::vector<std::string> labels(parts);
    for (int q = 0; q < parts; ++q) labels[q] = model_.labels.str(pick[q]->first.label);

    for (uint32_t parent : parent_labels_) {
      const std::string& parent_str = model_.labels.str(parent);
      int h = rules_.head_child(parent_str, labels);
      const State& head = pick[h]->first;

      // The comma constraint as the chart's free join order admits it: a
      // comma junction right of the head pins the child that follows it; a
      // comma junction left of the head needs some child from the head
      // rightwards to end before a comma or at the sentence end.
      if (cfg_.punctuation_rule) {
        bool ok = true;
        for (int q = h; q + 1 < parts && ok; ++q)
          if (junctions[q].comma && !ends_ok(bounds[q + 2])) ok = false;
        if (ok) {
          bool left_comma = false;
          for (int q = 0; q < h; ++q) left_comma = left_comma || junctions[q].comma;
          if (left_comma) {
            bool some = false;
            for (int b = h; b < parts && !some; ++b) some = ends_ok(bounds[b + 1]);
            ok = some;
          }
        }
        if (!ok) continue;
      }

      double dep_score = 0.0;
      bool dead = false;
      for (int q = 0; q < parts && !dead; ++q) {
        if (q == h) continue;
        const State& mod = pick[q]->first;
        auto rel = model_.lookup_triple(mod.label, parent, head.label);
        if (!rel) {
          dead = true;
          break;
        }
        int items = 0, verbs = 0;
        for (int b = std::min(q, h) + 1; b < std::max(q, h); ++b) {
          items += total_items(pick[b]->first);
          verbs += total_verbs(pick[b]->first);
        }
        const State& first = q < h ? mod : head;
        const State& second = q < h ? head : mod;
        items += first.items_right + second.items_left;
        verbs += first.verbs_right + second.verbs_left;
        DeltaFeatures dl = delta_from_parts(
            h < q, items, verbs,
            commas_between(first.head_item_end, second.head_item_begin),
            first.head_item_end < second.head_item_begin &&
                comma_at(first.head_item_end),
            second.head_item_begin - 1 >= first.head_item_end &&
                comma_at(second.head_item_begin - 1));
        BackoffEstimate dep = est_.dependency_prob(
            *rel, WordTag{word_id(mod.head_token), mod.head_tag},
            WordTag{word_id(head.head_token), head.head_tag}, dl.encode(),
            cfg_.tag_blind);
        if (dep.value <= 0.0) {
          dead = true;
          break;
        }
        dep_score += std::log(dep.value);
      }
      if (dead) continue;

      State out;
      out.label = parent;
      out.head_child_label = head.label;
      out.head_tag = head.head_tag;
      out.head_token = head.head_token;
      out.head_item_begin = head.head_item_begin;
      out.head_item_end = head.head_item_end;
      out.items_left = head.items_left;
      out.items_right = head.items_right;
      out.verbs_left = head.verbs_left;
      out.verbs_right = head.verbs_right;
      for (int q = 0; q < parts; ++q) {
        if (q < h) {
          out.items_left += total_items(pick[q]->first);
          out.verbs_left += total_verbs(pick[q]->first);
        } else if (q > h) {
          out.items_right += total_items(pick[q]->first);
          out.verbs_right += total_verbs(pick[q]->first);
        }
      }
      out.left_in_np = pick[0]->first.left_in_np;
      out.right_in_np = pick[parts - 1]->first.right_in_np;

      std::vector<ParseTree> kids;
      kids.reserve(parts);
      for (int q = 0; q < parts; ++q) kids.push_back(pick[q]->second.tree);
      offer(map, out, child_score + gap_score + dep_score,
            ParseTree::node(parent_str, std::move(kids)));
    }
  };
  rec(0);
}

}  // namespace

std::optional<OracleResult> enumerate_best(const Model& model,
                                           const HeadRuleTable& rules,
                                           const TaggedSentence& sentence,
                                           const ParserConfig& cfg, int max_words) {
  if (cfg.tag_distributions)
    throw std::invalid_argument("oracle: tag distributions unsupported");
  Enumerator e(model, rules, sentence, cfg);
  if (e.word_count() == 0 || e.word_count() > max_words)
    throw std::invalid_argument("oracle: sentence outside the enumeration bound");
  return e.best_root();
}

}  // namespace lexdep::testing
