#include "lexdep/chart.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace lexdep {

ParserConfig ParserConfig::variant(int v) {
  if (v < 1 || v > 4) throw std::invalid_argument("variant must be 1..4");
  ParserConfig cfg;
  cfg.punctuation_rule = v >= 2;
  cfg.tag_blind = v >= 3;
  cfg.tag_distributions = v >= 4;
  return cfg;
}

GapTag junction_gap_tag(bool left_in, bool right_in) {
  if (left_in && right_in) return GapTag::Between;
  if (left_in) return GapTag::End;
  if (right_in) return GapTag::Start;
  return GapTag::Null;
}

bool comma_join_allowed(const TaggedSentence& sentence, const PunctConfig& punct,
                        int left_last_word, int right_first_word,
                        int right_last_word) {
  bool separated = false;
  for (int t = left_last_word + 1; t < right_first_word; ++t)
    if (punct.is_comma(sentence.tokens[t].tag)) {
      separated = true;
      break;
    }
  if (!separated) return true;
  int next = right_last_word + 1;
  if (next >= sentence.size()) return true;
  if (punct.is_comma(sentence.tokens[next].tag)) return true;
  for (int t = next; t < sentence.size(); ++t)
    if (!punct.is_punct(sentence.tokens[t].tag)) return false;
  return true;  // last word of the sentence
}

ParseTree fallback_tree(const TaggedSentence& sentence, const std::string& root_label) {
  std::vector<ParseTree> kids;
  kids.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) kids.push_back(ParseTree::leaf(t.tag, t.word));
  return ParseTree::node(root_label, std::move(kids));
}

Parser::Parser(const Model& model, const HeadRuleTable& rules, ParserConfig cfg)
    : model_(model), rules_(rules), cfg_(std::move(cfg)) {}

namespace {

struct EdgeKey {
  uint32_t label = 0;             // label ids (labels interner)
  uint32_t head_child_label = 0;
  uint32_t head_tag = 0;          // tag ids (tags interner)
  uint32_t left_tag = 0;
  uint32_t right_tag = 0;
  int16_t head_item_begin = 0;    // original token span of the head's item
  int16_t head_item_end = 0;
  int16_t items_left = 0;         // reduced items beside the head, within the edge
  int16_t items_right = 0;
  int16_t verbs_left = 0;
  int16_t verbs_right = 0;
  bool left_in_np = false;
  bool right_in_np = false;

  bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
  size_t operator()(const EdgeKey& k) const {
    uint64_t h = 0xcbf29ce484222325ull;
    h = mix_hash(h, (static_cast<uint64_t>(k.label) << 32) | k.head_child_label);
    h = mix_hash(h, (static_cast<uint64_t>(k.head_tag) << 32) | k.left_tag);
    h = mix_hash(h, k.right_tag);
    h = mix_hash(h, (static_cast<uint64_t>(static_cast<uint16_t>(k.head_item_begin)) << 48) |
                        (static_cast<uint64_t>(static_cast<uint16_t>(k.head_item_end)) << 32) |
                        (static_cast<uint64_t>(static_cast<uint16_t>(k.items_left)) << 16) |
                        static_cast<uint16_t>(k.items_right));
    h = mix_hash(h, (static_cast<uint64_t>(static_cast<uint16_t>(k.verbs_left)) << 32) |
                        static_cast<uint16_t>(k.verbs_right));
    h = mix_hash(h, (k.left_in_np ? 2u : 0u) | (k.right_in_np ? 1u : 0u));
    return static_cast<size_t>(h);
  }
};

enum class EdgeKind : uint8_t { Word, BaseNP, NewParent, Extend };

struct Edge {
  EdgeKey key;
  int span_begin = 0;  // word positions (punctuation excluded), half-open
  int span_end = 0;
  double score = 0.0;
  int32_t factor_count = 0;
  int head_token = -1;  // original index of the head word
  EdgeKind kind = EdgeKind::Word;
  int32_t left = -1;   // arena indices; Extend: left = parent constituent
  int32_t right = -1;
  bool extend_right = false;
  uint32_t word_tag_label = 0;  // Word edges: label id of the chosen tag
  std::string serial;           // lazy; filled on tie-breaks
};

struct SpanCell {
  std::unordered_map<EdgeKey, int32_t, EdgeKeyHash> index;
  std::vector<int32_t> edges;
};

// Candidate tag for one word position: interner ids plus the log prob paid
// by the tag-distribution variant.
struct TagChoice {
  uint32_t tag_id = kNoField;      // tags interner
  uint32_t label_id = kNoField;    // labels interner
  std::string tag_str;
  bool is_verb = false;
  double log_prob = 0.0;
};

// Tree with original-token spans, used to re-insert punctuation before
// conversion to a ParseTree.
struct SpannedTree {
  std::string label;
  std::string word;
  int orig = -1;
  int begin = 0, end = 0;
  std::vector<SpannedTree> children;

  bool is_leaf() const { return children.empty(); }
  ParseTree to_parse_tree() const {
    if (is_leaf()) return ParseTree::leaf(label, word);
    std::vector<ParseTree> kids;
    kids.reserve(children.size());
    for (const auto& c : children) kids.push_back(c.to_parse_tree());
    return ParseTree::node(label, std::move(kids));
  }
};

class Chart {
 public:
  Chart(const Model& model, const HeadRuleTable& rules, const ParserConfig& cfg,
        const TaggedSentence& sentence)
      : model_(model), rules_(rules), cfg_(cfg), est_(model), sent_(sentence) {
    prepare();
  }

  int word_count() const { return W_; }

  // Runs the bottom-up fill at the given per-factor log threshold
  // (-inf disables it) and returns the best root, or nullopt.
  struct RootChoice {
    int32_t edge = -1;
    double total = kLogZero;
  };
  std::optional<RootChoice> run(double log_threshold);

  ParseTree build_output(const RootChoice& root) const;
  double extra_tag_log() const { return punct_tag_log_; }

 private:
  const Model& model_;
  const HeadRuleTable& rules_;
  const ParserConfig& cfg_;
  Estimator est_;
  const TaggedSentence& sent_;

  int n_ = 0;                    // tokens
  int W_ = 0;                    // words (punctuation excluded)
  std::vector<int> word_tok_;    // word position -> original token index
  std::vector<int> comma_prefix_;  // commas among tokens[0..i)
  std::vector<uint32_t> word_id_;  // per original token; kNoField if unseen
  std::vector<std::vector<TagChoice>> tag_choices_;  // per word position
  double punct_tag_log_ = 0.0;
  uint32_t np_label_ = kNoField;
  bool np_label_known_ = false;

  double log_threshold_ = kLogZero;
  std::deque<Edge> arena_;
  std::vector<SpanCell> cells_;

  mutable std::unordered_map<uint64_t, int> pair_head_memo_;
  mutable std::unordered_map<uint64_t, bool> extend_memo_;

  SpanCell& cell(int i, int j) { return cells_[i * (W_ + 1) + j]; }

  int commas_between(int tok_begin, int tok_end) const {
    if (tok_end <= tok_begin) return 0;
    return comma_prefix_[tok_end] - comma_prefix_[tok_begin];
  }
  bool comma_at(int tok) const {
    return tok >= 0 && tok < n_ && comma_prefix_[tok + 1] - comma_prefix_[tok] > 0;
  }

  void prepare();
  void seed_words(int i);
  void seed_base_np(int i, int j);
  void fill_span(int i, int j);
  void join_pair(int i, int s, int j, int32_t le_idx, int32_t re_idx);
  void insert_edge(int i, int j, Edge&& e);
  void apply_beam(int i, int j);

  int pair_head(uint32_t parent, uint32_t left_label, uint32_t right_label) const;
  bool extend_ok(uint32_t parent, uint32_t head_label, uint32_t new_label,
                 bool extend_right) const;

  int total_items(const EdgeKey& k) const { return k.items_left + k.items_right + 1; }
  int total_verbs(const EdgeKey& k) const {
    return k.verbs_left + k.verbs_right + (tag_is_verb(k.head_tag) ? 1 : 0);
  }
  bool tag_is_verb(uint32_t tag_id) const {
    return tag_id != kNoField && is_verb_tag(model_.tags.str(tag_id));
  }

  double dep_log(uint32_t relation, const Edge& mod, const Edge& head,
                 bool head_precedes, int items_between, int verbs_between) const;

  const std::string& serial(int32_t idx);
  SpannedTree build_spanned(const Edge& e) const;
};

void Chart::prepare() {
  n_ = sent_.size();
  comma_prefix_.assign(n_ + 1, 0);
  word_id_.resize(n_);
  for (int t = 0; t < n_; ++t) {
    const Token& tok = sent_.tokens[t];
    comma_prefix_[t + 1] = comma_prefix_[t] + (model_.punct.is_comma(tok.tag) ? 1 : 0);
    word_id_[t] = kNoField;
    if (auto id = model_.words.lookup(tok.word)) word_id_[t] = *id;
    if (!model_.punct.is_punct(tok.tag)) word_tok_.push_back(t);
  }
  W_ = static_cast<int>(word_tok_.size());

  if (auto np = model_.labels.lookup(cfg_.base_np_label)) {
    np_label_ = *np;
    np_label_known_ = true;
  }

  tag_choices_.resize(W_);
  for (int i = 0; i < W_; ++i) {
    const Token& tok = sent_.tokens[word_tok_[i]];
    auto add_choice = [&](const std::string& tag, double prob) {
      TagChoice c;
      c.tag_str = tag;
      c.is_verb = is_verb_tag(tag);
      c.log_prob = cfg_.tag_distributions ? std::log(prob) : 0.0;
      if (auto id = model_.tags.lookup(tag)) c.tag_id = *id;
      if (auto id = model_.labels.lookup(tag)) c.label_id = *id;
      tag_choices_[i].push_back(std::move(c));
    };
    if (cfg_.tag_distributions && sent_.has_distributions()) {
      // 1-best first: baseNP-internal words always use tag_choices_.front().
      double best_prob = kTagProbFloor;
      for (const TagProb& tp : sent_.tag_distributions[tok.index])
        if (tp.tag == tok.tag) best_prob = std::max(tp.prob, kTagProbFloor);
      add_choice(tok.tag, best_prob);
      for (const TagProb& tp : sent_.tag_distributions[tok.index])
        if (tp.prob > 0.0 && tp.tag != tok.tag) add_choice(tp.tag, tp.prob);
    } else {
      add_choice(tok.tag, 1.0);
    }
  }

  // The tag term runs over every token; punctuation keeps its given tag.
  if (cfg_.tag_distributions) {
    for (int t = 0; t < n_; ++t) {
      if (!model_.punct.is_punct(sent_.tokens[t].tag)) continue;
      double p = kTagProbFloor;
      for (const TagProb& tp : sent_.tag_distributions[t])
        if (tp.tag == sent_.tokens[t].tag) {
          p = tp.prob > 0.0 ? tp.prob : kTagProbFloor;
          break;
        }
      punct_tag_log_ += std::log(p);
    }
  }
}

int Chart::pair_head(uint32_t parent, uint32_t left_label, uint32_t right_label) const {
  uint64_t key = (static_cast<uint64_t>(parent) << 42) ^
                 (static_cast<uint64_t>(left_label) << 21) ^ right_label;
  auto it = pair_head_memo_.find(key);
  if (it != pair_head_memo_.end()) return it->second;
  int h = rules_.head_child(model_.labels.str(parent),
                            {model_.labels.str(left_label), model_.labels.str(right_label)});
  pair_head_memo_.emplace(key, h);
  return h;
}

bool Chart::extend_ok(uint32_t parent, uint32_t head_label, uint32_t new_label,
                      bool extend_right) const {
  uint64_t key = (static_cast<uint64_t>(parent) << 43) ^
                 (static_cast<uint64_t>(head_label) << 22) ^
                 (static_cast<uint64_t>(new_label) << 1) ^ (extend_right ? 1 : 0);
  auto it = extend_memo_.find(key);
  if (it != extend_memo_.end()) return it->second;
  bool ok = rules_.extension_keeps_head(model_.labels.str(parent),
                                        model_.labels.str(head_label),
                                        model_.labels.str(new_label), extend_right);
  extend_memo_.emplace(key, ok);
  return ok;
}

void Chart::seed_words(int i) {
  for (const TagChoice& c : tag_choices_[i]) {
    // A tag the model has never seen cannot take part in any dependency.
    if (c.label_id == kNoField || c.tag_id == kNoField) continue;
    Edge e;
    e.kind = EdgeKind::Word;
    e.span_begin = i;
    e.span_end = i + 1;
    e.score = c.log_prob;
    e.factor_count = 0;
    e.head_token = word_tok_[i];
    e.word_tag_label = c.label_id;
    e.key.label = c.label_id;
    e.key.head_child_label = c.label_id;
    e.key.head_tag = c.tag_id;
    e.key.left_tag = c.tag_id;
    e.key.right_tag = c.tag_id;
    e.key.head_item_begin = static_cast<int16_t>(word_tok_[i]);
    e.key.head_item_end = static_cast<int16_t>(word_tok_[i] + 1);
    insert_edge(i, i + 1, std::move(e));
  }
}

void Chart::seed_base_np(int i, int j) {
  if (!np_label_known_) return;
  double score = 0.0;
  int factors = 0;
  for (int k = i; k + 1 < j; ++k) {
    int lt = word_tok_[k], rt = word_tok_[k + 1];
    WordTag left{word_id_[lt], tag_choices_[k].front().tag_id};
    WordTag right{word_id_[rt], tag_choices_[k + 1].front().tag_id};
    BackoffEstimate g = est_.gap_prob(GapTag::Continue, left, right,
                                      commas_between(lt + 1, rt) > 0);
    if (g.value <= 0.0) return;
    score += std::log(g.value);
    ++factors;
  }
  // BaseNP-internal words keep their 1-best tags.
  if (cfg_.tag_distributions)
    for (int k = i; k < j; ++k) score += tag_choices_[k].front().log_prob;

  std::vector<std::string> tags;
  tags.reserve(j - i);
  for (int k = i; k < j; ++k) tags.push_back(tag_choices_[k].front().tag_str);
  int head_pos = i + rules_.head_child(cfg_.base_np_label, tags);

  Edge e;
  e.kind = EdgeKind::BaseNP;
  e.span_begin = i;
  e.span_end = j;
  e.score = score;
  e.factor_count = factors;
  e.head_token = word_tok_[head_pos];
  e.key.label = np_label_;
  e.key.head_child_label = np_label_;
  e.key.head_tag = tag_choices_[head_pos].front().tag_id;
  e.key.left_tag = tag_choices_[i].front().tag_id;
  e.key.right_tag = tag_choices_[j - 1].front().tag_id;
  e.key.head_item_begin = static_cast<int16_t>(word_tok_[i]);
  e.key.head_item_end = static_cast<int16_t>(word_tok_[j - 1] + 1);
  e.key.left_in_np = true;
  e.key.right_in_np = true;
  insert_edge(i, j, std::move(e));
}

double Chart::dep_log(uint32_t relation, const Edge& mod, const Edge& head,
                      bool head_precedes, int items_between, int verbs_between) const {
  const Edge& first = head_precedes ? head : mod;
  const Edge& second = head_precedes ? mod : head;
  int first_end = first.key.head_item_end;
  int second_begin = second.key.head_item_begin;
  DeltaFeatures dl = delta_from_parts(
      head_precedes, items_between, verbs_between,
      commas_between(first_end, second_begin),
      first_end < second_begin && comma_at(first_end),
      second_begin - 1 >= first_end && comma_at(second_begin - 1));
  BackoffEstimate est = est_.dependency_prob(
      relation, WordTag{word_id_[mod.head_token], mod.key.head_tag},
      WordTag{word_id_[head.head_token], head.key.head_tag}, dl.encode(),
      cfg_.tag_blind);
  return est.value > 0.0 ? std::log(est.value) : kLogZero;
}

void Chart::join_pair(int i, int s, int j, int32_t le_idx, int32_t re_idx) {
  const Edge le = arena_[le_idx];  // copies: the arena may grow/replace below
  const Edge re = arena_[re_idx];

  int left_last = word_tok_[s - 1];
  int right_first = word_tok_[s];
  bool jcomma = commas_between(left_last + 1, right_first) > 0;
  if (cfg_.punctuation_rule && jcomma &&
      !comma_join_allowed(sent_, model_.punct, left_last, right_first,
                          word_tok_[j - 1]))
    return;

  GapTag jtag = junction_gap_tag(le.key.right_in_np, re.key.left_in_np);
  BackoffEstimate gap = est_.gap_prob(jtag, WordTag{word_id_[left_last], le.key.right_tag},
                                      WordTag{word_id_[right_first], re.key.left_tag},
                                      jcomma);
  if (gap.value <= 0.0) return;
  double gap_log = std::log(gap.value);

  int items_between = le.key.items_right + re.key.items_left;
  int verbs_between = le.key.verbs_right + re.key.verbs_left;

  auto make_edge = [&](uint32_t label, const Edge& head, const Edge& modifier,
                       bool head_is_left, double dep_score, EdgeKind kind,
                       int32_t bp_left, int32_t bp_right, bool extend_right) {
    Edge e;
    e.kind = kind;
    e.span_begin = i;
    e.span_end = j;
    e.left = bp_left;
    e.right = bp_right;
    e.extend_right = extend_right;
    e.score = le.score + re.score + gap_log + dep_score;
    e.factor_count = le.factor_count + re.factor_count + 2;
    e.head_token = head.head_token;
    e.key.label = label;
    e.key.head_child_label = kind == EdgeKind::Extend ? head.key.head_child_label
                                                      : head.key.label;
    e.key.head_tag = head.key.head_tag;
    e.key.left_tag = le.key.left_tag;
    e.key.right_tag = re.key.right_tag;
    e.key.head_item_begin = head.key.head_item_begin;
    e.key.head_item_end = head.key.head_item_end;
    e.key.left_in_np = le.key.left_in_np;
    e.key.right_in_np = re.key.right_in_np;
    if (head_is_left) {
      e.key.items_left = le.key.items_left;
      e.key.items_right = static_cast<int16_t>(le.key.items_right + total_items(modifier.key));
      e.key.verbs_left = le.key.verbs_left;
      e.key.verbs_right = static_cast<int16_t>(le.key.verbs_right + total_verbs(modifier.key));
    } else {
      e.key.items_left = static_cast<int16_t>(re.key.items_left + total_items(modifier.key));
      e.key.items_right = re.key.items_right;
      e.key.verbs_left = static_cast<int16_t>(re.key.verbs_left + total_verbs(modifier.key));
      e.key.verbs_right = re.key.verbs_right;
    }
    insert_edge(i, j, std::move(e));
  };

  // New parent over the two constituents; the head rules pick the head side.
  auto try_new_parents = [&](bool head_is_left) {
    const Edge& head = head_is_left ? le : re;
    const Edge& mod = head_is_left ? re : le;
    for (uint32_t parent : model_.parent_candidates(mod.key.label, head.key.label)) {
      int h = pair_head(parent, le.key.label, re.key.label);
      if ((h == 0) != head_is_left) continue;
      auto rel = model_.lookup_triple(mod.key.label, parent, head.key.label);
      if (!rel) continue;
      double dep = dep_log(*rel, mod, head, head_is_left, items_between, verbs_between);
      if (dep == kLogZero) continue;
      make_edge(parent, head, mod, head_is_left, dep, EdgeKind::NewParent, le_idx,
                re_idx, false);
    }
  };
  try_new_parents(true);
  try_new_parents(false);

  // Extend an existing constituent with one more modifier child.
  auto try_extend = [&](const Edge& parent, const Edge& child, int32_t parent_idx,
                        int32_t child_idx, bool extend_right) {
    if (parent.kind != EdgeKind::NewParent && parent.kind != EdgeKind::Extend) return;
    auto rel = model_.lookup_triple(child.key.label, parent.key.label,
                                    parent.key.head_child_label);
    if (!rel) return;
    if (!extend_ok(parent.key.label, parent.key.head_child_label, child.key.label,
                   extend_right))
      return;
    double dep = dep_log(*rel, child, parent, /*head_precedes=*/extend_right,
                         items_between, verbs_between);
    if (dep == kLogZero) return;
    make_edge(parent.key.label, parent, child, /*head_is_left=*/extend_right, dep,
              EdgeKind::Extend, parent_idx, child_idx, extend_right);
  };
  try_extend(le, re, le_idx, re_idx, /*extend_right=*/true);
  try_extend(re, le, re_idx, le_idx, /*extend_right=*/false);
}

void Chart::insert_edge(int i, int j, Edge&& e) {
  if (log_threshold_ != kLogZero && e.factor_count > 0 &&
      e.score < e.factor_count * log_threshold_)
    return;
  SpanCell& c = cell(i, j);
  auto it = c.index.find(e.key);
  if (it == c.index.end()) {
    int32_t idx = static_cast<int32_t>(arena_.size());
    arena_.push_back(std::move(e));
    c.index.emplace(arena_.back().key, idx);
    c.edges.push_back(idx);
    return;
  }
  // Equal-score duplicates resolve to the lexicographically smaller tree so
  // results are deterministic and match the enumeration oracle.
  bool replace;
  if (e.score > arena_[it->second].score + kScoreTieEps) {
    replace = true;
  } else if (arena_[it->second].score > e.score + kScoreTieEps) {
    replace = false;
  } else {
    std::string new_serial = build_spanned(e).to_parse_tree().to_string();
    replace = score_better(e.score, new_serial, arena_[it->second].score,
                           serial(it->second));
    if (replace) e.serial = std::move(new_serial);
  }
  if (replace) arena_[it->second] = std::move(e);
}

void Chart::apply_beam(int i, int j) {
  if (cfg_.beam <= 0.0) return;
  SpanCell& c = cell(i, j);
  if (c.edges.empty()) return;
  double best = kLogZero;
  for (int32_t idx : c.edges) best = std::max(best, arena_[idx].score);
  double cutoff = best - std::log(cfg_.beam);
  std::vector<int32_t> kept;
  kept.reserve(c.edges.size());
  for (int32_t idx : c.edges) {
    if (arena_[idx].score >= cutoff) {
      kept.push_back(idx);
    } else {
      c.index.erase(arena_[idx].key);
    }
  }
  c.edges = std::move(kept);
}

void Chart::fill_span(int i, int j) {
  if (j - i == 1) seed_words(i);
  seed_base_np(i, j);
  for (int s = i + 1; s < j; ++s) {
    // Copies of the index lists: joins append to the current span only,
    // never to sub-spans, but keep iteration robust anyway.
    std::vector<int32_t> left_edges = cell(i, s).edges;
    std::vector<int32_t> right_edges = cell(s, j).edges;
    for (int32_t le : left_edges)
      for (int32_t re : right_edges) join_pair(i, s, j, le, re);
  }
  apply_beam(i, j);
}

std::optional<Chart::RootChoice> Chart::run(double log_threshold) {
  log_threshold_ = log_threshold;
  arena_.clear();
  cells_.assign((W_ + 1) * (W_ + 1), SpanCell{});
  for (int w = 1; w <= W_; ++w)
    for (int i = 0; i + w <= W_; ++i) fill_span(i, i + w);

  std::optional<RootChoice> best;
  for (int32_t idx : cell(0, W_).edges) {
    const Edge& e = arena_[idx];
    auto rel = model_.lookup_triple(kRootId, e.key.label, kRootId);
    if (!rel) continue;
    BackoffEstimate root = est_.dependency_prob(
        *rel, WordTag{word_id_[e.head_token], e.key.head_tag},
        Estimator::root_word_tag(), kDeltaRoot, cfg_.tag_blind);
    if (root.value <= 0.0) continue;
    double total = e.score + std::log(root.value);
    if (!best) {
      best = RootChoice{idx, total};
    } else if (total > best->total + kScoreTieEps) {
      best = RootChoice{idx, total};
    } else if (!(best->total > total + kScoreTieEps) &&
               serial(idx) < serial(best->edge)) {
      best = RootChoice{idx, total};
    }
  }
  return best;
}

const std::string& Chart::serial(int32_t idx) {
  Edge& e = arena_[idx];
  if (e.serial.empty()) e.serial = build_spanned(e).to_parse_tree().to_string();
  return e.serial;
}

SpannedTree Chart::build_spanned(const Edge& e) const {
  SpannedTree t;
  switch (e.kind) {
    case EdgeKind::Word: {
      const Token& tok = sent_.tokens[e.head_token];
      t.label = model_.tags.str(e.key.head_tag);
      t.word = tok.word;
      t.orig = e.head_token;
      t.begin = e.head_token;
      t.end = e.head_token + 1;
      return t;
    }
    case EdgeKind::BaseNP: {
      t.label = cfg_.base_np_label;
      t.begin = word_tok_[e.span_begin];
      t.end = word_tok_[e.span_end - 1] + 1;
      for (int tok = t.begin; tok < t.end; ++tok) {
        SpannedTree leaf;
        const Token& token = sent_.tokens[tok];
        bool punct = model_.punct.is_punct(token.tag);
        leaf.label = token.tag;
        if (!punct) {
          // Word positions keep their (possibly variant-4 1-best) tags.
          int pos = static_cast<int>(std::lower_bound(word_tok_.begin(), word_tok_.end(),
                                                      tok) -
                                     word_tok_.begin());
          leaf.label = tag_choices_[pos].front().tag_str;
        }
        leaf.word = token.word;
        leaf.orig = tok;
        leaf.begin = tok;
        leaf.end = tok + 1;
        t.children.push_back(std::move(leaf));
      }
      return t;
    }
    case EdgeKind::NewParent: {
      t.label = model_.labels.str(e.key.label);
      t.children.push_back(build_spanned(arena_[e.left]));
      t.children.push_back(build_spanned(arena_[e.right]));
      t.begin = t.children.front().begin;
      t.end = t.children.back().end;
      return t;
    }
    case EdgeKind::Extend: {
      t = build_spanned(arena_[e.left]);
      SpannedTree child = build_spanned(arena_[e.right]);
      if (e.extend_right) {
        t.end = child.end;
        t.children.push_back(std::move(child));
      } else {
        t.begin = child.begin;
        t.children.insert(t.children.begin(), std::move(child));
      }
      return t;
    }
  }
  throw std::logic_error("unreachable edge kind");
}

namespace {

void insert_punct_token(SpannedTree* node, SpannedTree leaf) {
  // The leaf lies inside node's span; put it between the two children it
  // separates, or recurse into the child containing it.
  for (size_t k = 0; k < node->children.size(); ++k) {
    SpannedTree& child = node->children[k];
    if (leaf.orig < child.begin) {
      node->children.insert(node->children.begin() + k, std::move(leaf));
      return;
    }
    if (leaf.orig < child.end) {
      insert_punct_token(&child, std::move(leaf));
      return;
    }
  }
  node->children.push_back(std::move(leaf));
}

void collect_covered(const SpannedTree& t, std::vector<bool>* covered) {
  if (t.is_leaf()) {
    (*covered)[t.orig] = true;
    return;
  }
  for (const auto& c : t.children) collect_covered(c, covered);
}

}  // namespace

ParseTree Chart::build_output(const RootChoice& root) const {
  SpannedTree tree = build_spanned(arena_[root.edge]);
  // Punctuation inside a baseNP span is already present; attach the rest at
  // the lowest constituent whose span flanks it.
  std::vector<bool> covered(n_, false);
  collect_covered(tree, &covered);
  for (int tok = 0; tok < n_; ++tok) {
    if (covered[tok]) continue;
    const Token& token = sent_.tokens[tok];
    SpannedTree leaf;
    leaf.label = token.tag;
    leaf.word = token.word;
    leaf.orig = tok;
    leaf.begin = tok;
    leaf.end = tok + 1;
    insert_punct_token(&tree, std::move(leaf));
    tree.begin = std::min(tree.begin, tok);
    tree.end = std::max(tree.end, tok + 1);
  }
  return tree.to_parse_tree();
}

}  // namespace

ParseResult Parser::parse(const TaggedSentence& sentence) const {
  if (sentence.tokens.empty())
    throw std::invalid_argument("parse: empty sentence");
  if (cfg_.tag_distributions && !sentence.has_distributions())
    throw std::invalid_argument(
        "tag-distribution variant requires tag distributions on the input");

  auto fallback = [&]() {
    ParseResult r;
    r.tree = fallback_tree(sentence, model_.most_frequent_root_label());
    r.fallback = true;
    r.log_score = kLogZero;
    return r;
  };

  if (cfg_.max_length > 0 && sentence.size() > cfg_.max_length) return fallback();

  Chart chart(model_, rules_, cfg_, sentence);
  if (chart.word_count() == 0)
    throw std::invalid_argument("parse: sentence has no words after punctuation removal");

  int attempts = cfg_.initial_threshold > 0.0 ? cfg_.max_retries + 1 : 1;
  double threshold = cfg_.initial_threshold;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    double log_thresh = threshold > 0.0 ? std::log(threshold) : kLogZero;
    auto best = chart.run(log_thresh);
    if (best) {
      ParseResult r;
      r.tree = chart.build_output(*best);
      r.log_score = best->total + chart.extra_tag_log();
      r.retries = attempt;
      return r;
    }
    threshold *= cfg_.threshold_decay;
  }
  ParseResult r = fallback();
  r.retries = attempts - 1;
  return r;
}

}  // namespace lexdep
