#include "lexdep/model.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace lexdep {

uint64_t mix_hash(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

Interner::Interner() { intern(kRootMarker); }

uint32_t Interner::intern(const std::string& s) {
  auto it = ids_.find(s);
  if (it != ids_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(strings_.size());
  strings_.push_back(s);
  ids_.emplace(s, id);
  return id;
}

std::optional<uint32_t> Interner::lookup(const std::string& s) const {
  auto it = ids_.find(s);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

namespace {

uint64_t triple_key(uint32_t m, uint32_t p, uint32_t h) {
  return (static_cast<uint64_t>(m) << 42) ^ (static_cast<uint64_t>(p) << 21) ^ h;
}

void bump(uint32_t& count) {
  if (count == UINT32_MAX)
    throw std::overflow_error("count table overflow (32-bit counts)");
  ++count;
}

}  // namespace

uint32_t Model::intern_triple(uint32_t m, uint32_t p, uint32_t h) {
  uint64_t key = triple_key(m, p, h);
  auto it = triple_ids_.find(key);
  if (it != triple_ids_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(triples_.size());
  triples_.push_back({m, p, h});
  triple_ids_.emplace(key, id);
  return id;
}

std::optional<uint32_t> Model::lookup_triple(uint32_t m, uint32_t p, uint32_t h) const {
  auto it = triple_ids_.find(triple_key(m, p, h));
  if (it == triple_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<uint32_t> Model::lookup_triple(const RelationTriple& r) const {
  auto m = labels.lookup(r.modifier);
  auto p = labels.lookup(r.parent);
  auto h = labels.lookup(r.head_child);
  if (!m || !p || !h) return std::nullopt;
  return lookup_triple(*m, *p, *h);
}

DepKey Model::dep_key(int level, bool tag_blind, const WordTag& mod,
                      const WordTag& head, uint8_t delta) {
  DepKey k;
  k.delta = delta;
  if (!tag_blind) {
    switch (level) {
      case 0: k = {mod.word, mod.tag, head.word, head.tag, delta}; break;
      case 1: k = {mod.word, mod.tag, head.tag, kNoField, delta}; break;
      case 2: k = {mod.tag, head.word, head.tag, kNoField, delta}; break;
      case 3: k = {mod.tag, head.tag, kNoField, kNoField, delta}; break;
    }
  } else {
    switch (level) {
      case 0: k = {mod.word, head.word, kNoField, kNoField, delta}; break;
      case 1: k = {mod.word, head.tag, kNoField, kNoField, delta}; break;
      case 2: k = {mod.tag, head.word, kNoField, kNoField, delta}; break;
      case 3: k = {mod.tag, head.tag, kNoField, kNoField, delta}; break;
    }
  }
  return k;
}

GapKey Model::gap_key(int level, const WordTag& left, const WordTag& right,
                      bool comma) {
  GapKey k;
  k.comma = comma ? 1 : 0;
  switch (level) {
    case 0: k = {left.word, left.tag, right.word, right.tag, k.comma}; break;
    case 1: k = {left.word, left.tag, right.tag, kNoField, k.comma}; break;
    case 2: k = {left.tag, right.word, right.tag, kNoField, k.comma}; break;
    case 3: k = {left.tag, right.tag, kNoField, kNoField, k.comma}; break;
  }
  return k;
}

WordTag Model::intern_word_tag(const std::string& word, const std::string& tag) {
  return WordTag{words.intern(word), tags.intern(tag)};
}

WordTag Model::lookup_word_tag(const std::string& word, const std::string& tag) const {
  WordTag wt;
  if (auto w = words.lookup(word)) wt.word = *w;
  if (auto t = tags.lookup(tag)) wt.tag = *t;
  return wt;
}

namespace {

template <typename K, typename H>
uint32_t get_count(const CountTable<K, H>& table, const K& key) {
  auto it = table.find(key);
  return it == table.end() ? 0 : it->second;
}

}  // namespace

uint32_t Model::dep_denom(int level, bool tag_blind, const DepKey& key) const {
  return get_count((tag_blind ? dep_tag_blind : dep).denom[level], key);
}

uint32_t Model::dep_numer(int level, bool tag_blind, const DepKey& key,
                          uint32_t rel) const {
  return get_count((tag_blind ? dep_tag_blind : dep).numer[level], ArcKey{key, rel});
}

uint32_t Model::gap_denom_count(int level, const GapKey& key) const {
  return get_count(gap_denom[level], key);
}

uint32_t Model::gap_numer_count(int level, const GapKey& key, GapTag tag) const {
  return get_count(gap_numer[level],
                   GapArcKey{key, static_cast<uint8_t>(tag)});
}

void Model::build_indexes() {
  parent_index_.clear();
  for (uint32_t id = 0; id < triples_.size(); ++id) {
    const auto& t = triples_[id];
    if (t[0] == kRootId && t[2] == kRootId) continue;  // root attachments
    uint64_t key = (static_cast<uint64_t>(t[0]) << 32) | t[2];
    auto& parents = parent_index_[key];
    if (std::find(parents.begin(), parents.end(), t[1]) == parents.end())
      parents.push_back(t[1]);
  }
  for (auto& [key, parents] : parent_index_) std::sort(parents.begin(), parents.end());
}

const std::vector<uint32_t>& Model::parent_candidates(uint32_t mod_label,
                                                      uint32_t head_child_label) const {
  uint64_t key = (static_cast<uint64_t>(mod_label) << 32) | head_child_label;
  auto it = parent_index_.find(key);
  return it == parent_index_.end() ? no_parents_ : it->second;
}

std::string Model::most_frequent_root_label() const {
  std::string best;
  uint64_t best_count = 0;
  for (const auto& [id, count] : root_label_counts) {
    const std::string& label = labels.str(id);
    if (count > best_count || (count == best_count && (best.empty() || label < best))) {
      best = label;
      best_count = count;
    }
  }
  return best.empty() ? "S" : best;
}

void count_sentence(Model* model, const Analysis& analysis) {
  const ReducedSentence& reduced = analysis.reduced;
  const int m = static_cast<int>(reduced.size());

  std::vector<WordTag> items(m);
  for (int j = 0; j < m; ++j)
    items[j] = model->intern_word_tag(reduced[j].word, reduced[j].tag);

  // AF as (head, relation id) per reduced item.
  std::vector<std::pair<int, uint32_t>> af(m);
  for (const Dependency& d : analysis.dependencies) {
    uint32_t rel = model->intern_triple(model->labels.intern(d.relation.modifier),
                                        model->labels.intern(d.relation.parent),
                                        model->labels.intern(d.relation.head_child));
    af[d.modifier] = {d.head, rel};
  }

  const WordTag root_wt{kRootId, kRootId};
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      if (l == k) continue;
      uint8_t dl = delta(reduced, analysis.sentence, k, l, model->punct).encode();
      bool is_arc = af[k].first == l;
      for (int level = 0; level < 4; ++level) {
        DepKey key = Model::dep_key(level, false, items[k], items[l], dl);
        bump(model->dep.denom[level][key]);
        if (is_arc) bump(model->dep.numer[level][ArcKey{key, af[k].second}]);
        DepKey bkey = Model::dep_key(level, true, items[k], items[l], dl);
        bump(model->dep_tag_blind.denom[level][bkey]);
        if (is_arc) bump(model->dep_tag_blind.numer[level][ArcKey{bkey, af[k].second}]);
      }
    }
    // Root pseudo-pair: every item is a candidate root.
    bool is_root = af[k].first == kRootHead;
    for (int level = 0; level < 4; ++level) {
      DepKey key = Model::dep_key(level, false, items[k], root_wt, kDeltaRoot);
      bump(model->dep.denom[level][key]);
      if (is_root) bump(model->dep.numer[level][ArcKey{key, af[k].second}]);
      DepKey bkey = Model::dep_key(level, true, items[k], root_wt, kDeltaRoot);
      bump(model->dep_tag_blind.denom[level][bkey]);
      if (is_root) bump(model->dep_tag_blind.numer[level][ArcKey{bkey, af[k].second}]);
    }
  }

  for (const Gap& g : analysis.gaps) {
    const Token& lt = analysis.sentence.tokens[g.left_token];
    const Token& rt = analysis.sentence.tokens[g.right_token];
    WordTag left = model->intern_word_tag(lt.word, lt.tag);
    WordTag right = model->intern_word_tag(rt.word, rt.tag);
    for (int level = 0; level < 4; ++level) {
      GapKey key = Model::gap_key(level, left, right, g.comma);
      bump(model->gap_denom[level][key]);
      bump(model->gap_numer[level][GapArcKey{key, static_cast<uint8_t>(g.tag)}]);
    }
  }

  ++model->root_label_counts[model->labels.intern(analysis.root_label)];
  ++model->sentence_count;
}

namespace {

Model train_chunk(const std::vector<ParseTree>& treebank, size_t begin, size_t end,
                  const HeadRuleTable& rules, const TrainOptions& opts,
                  std::vector<std::string>* warnings) {
  Model model;
  model.punct = opts.punct;
  model.head_rule_hash = rules.hash();
  for (size_t i = begin; i < end; ++i) {
    try {
      Analysis a = analyze(treebank[i], rules, opts.punct);
      count_sentence(&model, a);
    } catch (const std::exception& e) {
      ++model.skipped_sentences;
      warnings->push_back("skipping tree " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return model;
}

}  // namespace

Model train(const std::vector<ParseTree>& treebank, const HeadRuleTable& rules,
            const TrainOptions& opts) {
  if (treebank.empty()) throw std::invalid_argument("train: empty treebank");
  int jobs = std::max(1, opts.jobs);
  jobs = std::min<int>(jobs, static_cast<int>(treebank.size()));

  std::vector<Model> shards(jobs);
  std::vector<std::vector<std::string>> warnings(jobs);
  if (jobs == 1) {
    shards[0] = train_chunk(treebank, 0, treebank.size(), rules, opts, &warnings[0]);
  } else {
    std::vector<std::thread> threads;
    size_t per = (treebank.size() + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
      size_t begin = w * per;
      size_t end = std::min(treebank.size(), begin + per);
      threads.emplace_back([&, w, begin, end] {
        shards[w] = train_chunk(treebank, begin, end, rules, opts, &warnings[w]);
      });
    }
    for (auto& t : threads) t.join();
  }

  // Merging in corpus order keeps id assignment identical to a single-shard
  // run, so model files come out byte-identical however training is split.
  Model model = std::move(shards[0]);
  for (int w = 1; w < jobs; ++w) merge_into(&model, shards[w]);

  uint64_t skipped = 0;
  for (int w = 0; w < jobs; ++w) {
    skipped += warnings[w].size();
    if (opts.verbose)
      for (const auto& msg : warnings[w]) std::cerr << "warning: " << msg << "\n";
  }
  if (skipped > 0 && !opts.verbose)
    std::cerr << "warning: skipped " << skipped << " unprocessable trees\n";

  model.build_indexes();
  return model;
}

namespace {

enum class Slot { Word, Tag, None };

using SlotSpec = std::array<Slot, 4>;

SlotSpec dep_slots(int level, bool tag_blind) {
  if (!tag_blind) {
    switch (level) {
      case 0: return {Slot::Word, Slot::Tag, Slot::Word, Slot::Tag};
      case 1: return {Slot::Word, Slot::Tag, Slot::Tag, Slot::None};
      case 2: return {Slot::Tag, Slot::Word, Slot::Tag, Slot::None};
      default: return {Slot::Tag, Slot::Tag, Slot::None, Slot::None};
    }
  }
  switch (level) {
    case 0: return {Slot::Word, Slot::Word, Slot::None, Slot::None};
    case 1: return {Slot::Word, Slot::Tag, Slot::None, Slot::None};
    case 2: return {Slot::Tag, Slot::Word, Slot::None, Slot::None};
    default: return {Slot::Tag, Slot::Tag, Slot::None, Slot::None};
  }
}

SlotSpec gap_slots(int level) {
  switch (level) {
    case 0: return {Slot::Word, Slot::Tag, Slot::Word, Slot::Tag};
    case 1: return {Slot::Word, Slot::Tag, Slot::Tag, Slot::None};
    case 2: return {Slot::Tag, Slot::Word, Slot::Tag, Slot::None};
    default: return {Slot::Tag, Slot::Tag, Slot::None, Slot::None};
  }
}

struct IdMaps {
  std::vector<uint32_t> words, tags, labels, triples;
  uint32_t map_slot(Slot s, uint32_t id) const {
    if (id == kNoField) return kNoField;
    switch (s) {
      case Slot::Word: return words[id];
      case Slot::Tag: return tags[id];
      case Slot::None: break;
    }
    throw std::logic_error("id in an unused key slot");
  }
};

void add_count(uint32_t& dst, uint32_t src) {
  uint64_t sum = static_cast<uint64_t>(dst) + src;
  if (sum > UINT32_MAX)
    throw std::overflow_error("count table overflow while merging");
  dst = static_cast<uint32_t>(sum);
}

}  // namespace

void merge_into(Model* dst, const Model& src) {
  if (dst->punct.comma_tags != src.punct.comma_tags ||
      dst->punct.eval_punct_tags != src.punct.eval_punct_tags ||
      dst->head_rule_hash != src.head_rule_hash)
    throw std::invalid_argument("merge_into: models trained with different configs");

  IdMaps maps;
  auto remap_interner = [](Interner& d, const Interner& s) {
    std::vector<uint32_t> map(s.size());
    for (uint32_t i = 0; i < s.size(); ++i) map[i] = d.intern(s.str(i));
    return map;
  };
  maps.words = remap_interner(dst->words, src.words);
  maps.tags = remap_interner(dst->tags, src.tags);
  maps.labels = remap_interner(dst->labels, src.labels);
  maps.triples.resize(src.triple_count());
  for (uint32_t i = 0; i < src.triple_count(); ++i) {
    auto t = src.triple(i);
    maps.triples[i] =
        dst->intern_triple(maps.labels[t[0]], maps.labels[t[1]], maps.labels[t[2]]);
  }

  auto merge_dep = [&](DepTables& d, const DepTables& s, bool tag_blind) {
    for (int level = 0; level < 4; ++level) {
      SlotSpec slots = dep_slots(level, tag_blind);
      for (const auto& [key, count] : s.denom[level]) {
        DepKey k{maps.map_slot(slots[0], key.a), maps.map_slot(slots[1], key.b),
                 maps.map_slot(slots[2], key.c), maps.map_slot(slots[3], key.d),
                 key.delta};
        add_count(d.denom[level][k], count);
      }
      for (const auto& [key, count] : s.numer[level]) {
        DepKey k{maps.map_slot(slots[0], key.pair.a), maps.map_slot(slots[1], key.pair.b),
                 maps.map_slot(slots[2], key.pair.c), maps.map_slot(slots[3], key.pair.d),
                 key.pair.delta};
        add_count(d.numer[level][ArcKey{k, maps.triples[key.relation]}], count);
      }
    }
  };
  merge_dep(dst->dep, src.dep, false);
  merge_dep(dst->dep_tag_blind, src.dep_tag_blind, true);

  for (int level = 0; level < 4; ++level) {
    SlotSpec slots = gap_slots(level);
    for (const auto& [key, count] : src.gap_denom[level]) {
      GapKey k{maps.map_slot(slots[0], key.a), maps.map_slot(slots[1], key.b),
               maps.map_slot(slots[2], key.c), maps.map_slot(slots[3], key.d),
               key.comma};
      add_count(dst->gap_denom[level][k], count);
    }
    for (const auto& [key, count] : src.gap_numer[level]) {
      GapKey k{maps.map_slot(slots[0], key.context.a), maps.map_slot(slots[1], key.context.b),
               maps.map_slot(slots[2], key.context.c), maps.map_slot(slots[3], key.context.d),
               key.context.comma};
      add_count(dst->gap_numer[level][GapArcKey{k, key.tag}], count);
    }
  }

  for (const auto& [label, count] : src.root_label_counts)
    dst->root_label_counts[maps.labels[label]] += count;
  dst->sentence_count += src.sentence_count;
  dst->skipped_sentences += src.skipped_sentences;
  dst->build_indexes();
}

// ---------------------------------------------------------------------------
// Serialization. Header: magic, format version, config digest. Body: a fixed
// sequence of length-prefixed sections, tables sorted by key so identical
// models produce identical bytes.

namespace {

constexpr char kMagic[4] = {'L', 'D', 'P', 'M'};
constexpr uint32_t kVersion = 1;

struct Writer {
  std::ostream& out;
  void bytes(const void* p, size_t n) { out.write(static_cast<const char*>(p), n); }
  void u8(uint8_t v) { bytes(&v, 1); }
  void u32(uint32_t v) {
    uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                    static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    bytes(b, 4);
  }
  void u64(uint64_t v) {
    u32(static_cast<uint32_t>(v));
    u32(static_cast<uint32_t>(v >> 32));
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
};

struct Reader {
  std::istream& in;
  uint64_t offset = 0;
  void bytes(void* p, size_t n) {
    in.read(static_cast<char*>(p), n);
    if (static_cast<size_t>(in.gcount()) != n)
      throw ModelIOError("model file truncated", offset);
    offset += n;
  }
  uint8_t u8() {
    uint8_t v;
    bytes(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint8_t b[4];
    bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }
  uint64_t u64() {
    uint64_t lo = u32();
    return lo | (static_cast<uint64_t>(u32()) << 32);
  }
  std::string str() {
    uint32_t n = u32();
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }
};

template <typename K, typename H, typename WriteKey>
void write_table(Writer& w, const CountTable<K, H>& table, WriteKey write_key) {
  std::vector<std::pair<K, uint32_t>> entries(table.begin(), table.end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  w.u64(entries.size());
  for (const auto& [key, count] : entries) {
    write_key(key);
    w.u32(count);
  }
}

void write_dep_key(Writer& w, const DepKey& k) {
  w.u32(k.a);
  w.u32(k.b);
  w.u32(k.c);
  w.u32(k.d);
  w.u8(k.delta);
}

DepKey read_dep_key(Reader& r) {
  DepKey k;
  k.a = r.u32();
  k.b = r.u32();
  k.c = r.u32();
  k.d = r.u32();
  k.delta = r.u8();
  return k;
}

void write_gap_key(Writer& w, const GapKey& k) {
  w.u32(k.a);
  w.u32(k.b);
  w.u32(k.c);
  w.u32(k.d);
  w.u8(k.comma);
}

GapKey read_gap_key(Reader& r) {
  GapKey k;
  k.a = r.u32();
  k.b = r.u32();
  k.c = r.u32();
  k.d = r.u32();
  k.comma = r.u8();
  return k;
}

void write_section(Writer& w, uint32_t id, const std::string& payload) {
  w.u32(id);
  w.u64(payload.size());
  w.bytes(payload.data(), payload.size());
}

std::string expect_section(Reader& r, uint32_t expect_id) {
  uint32_t id = r.u32();
  if (id != expect_id)
    throw ModelIOError("unexpected section " + std::to_string(id) + ", expected " +
                           std::to_string(expect_id),
                       r.offset - 4);
  uint64_t len = r.u64();
  std::string payload(len, '\0');
  if (len) r.bytes(payload.data(), len);
  return payload;
}

uint64_t config_digest(const Model& m) {
  uint64_t h = 1469598103934665603ull;
  auto mix_str = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  for (const auto& t : m.punct.comma_tags) mix_str(t);
  mix_str("|");
  for (const auto& t : m.punct.eval_punct_tags) mix_str(t);
  h = mix_hash(h, m.head_rule_hash);
  return h;
}

}  // namespace

void Model::save(std::ostream& out) const {
  Writer w{out};
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u64(config_digest(*this));

  auto section = [&](uint32_t id, auto fill) {
    std::ostringstream buf;
    Writer sw{buf};
    fill(sw);
    write_section(w, id, buf.str());
  };

  section(1, [&](Writer& sw) {
    sw.u64(sentence_count);
    sw.u64(skipped_sentences);
    sw.u64(head_rule_hash);
    sw.u32(static_cast<uint32_t>(punct.comma_tags.size()));
    for (const auto& t : punct.comma_tags) sw.str(t);
    sw.u32(static_cast<uint32_t>(punct.eval_punct_tags.size()));
    for (const auto& t : punct.eval_punct_tags) sw.str(t);
    std::vector<std::pair<uint32_t, uint64_t>> roots(root_label_counts.begin(),
                                                     root_label_counts.end());
    std::sort(roots.begin(), roots.end());
    sw.u32(static_cast<uint32_t>(roots.size()));
    for (const auto& [label, count] : roots) {
      sw.u32(label);
      sw.u64(count);
    }
  });

  auto write_interner = [&](uint32_t id, const Interner& interner) {
    section(id, [&](Writer& sw) {
      sw.u32(interner.size());
      for (uint32_t i = 0; i < interner.size(); ++i) sw.str(interner.str(i));
    });
  };
  write_interner(2, words);
  write_interner(3, tags);
  write_interner(4, labels);

  section(5, [&](Writer& sw) {
    sw.u32(triple_count());
    for (uint32_t i = 0; i < triple_count(); ++i) {
      auto t = triple(i);
      sw.u32(t[0]);
      sw.u32(t[1]);
      sw.u32(t[2]);
    }
  });

  uint32_t next_id = 6;
  auto write_dep_tables = [&](const DepTables& tables) {
    for (int level = 0; level < 4; ++level)
      section(next_id++, [&](Writer& sw) {
        write_table(sw, tables.denom[level], [&](const DepKey& k) { write_dep_key(sw, k); });
      });
    for (int level = 0; level < 4; ++level)
      section(next_id++, [&](Writer& sw) {
        write_table(sw, tables.numer[level], [&](const ArcKey& k) {
          write_dep_key(sw, k.pair);
          sw.u32(k.relation);
        });
      });
  };
  write_dep_tables(dep);
  write_dep_tables(dep_tag_blind);

  for (int level = 0; level < 4; ++level)
    section(next_id++, [&](Writer& sw) {
      write_table(sw, gap_denom[level], [&](const GapKey& k) { write_gap_key(sw, k); });
    });
  for (int level = 0; level < 4; ++level)
    section(next_id++, [&](Writer& sw) {
      write_table(sw, gap_numer[level], [&](const GapArcKey& k) {
        write_gap_key(sw, k.context);
        sw.u8(k.tag);
      });
    });
}

void Model::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
  save(out);
  if (!out) throw std::runtime_error("error writing model file: " + path);
}

Model Model::load(std::istream& in) {
  Reader r{in};
  char magic[4];
  r.bytes(magic, 4);
  if (std::string(magic, 4) != std::string(kMagic, 4))
    throw ModelIOError("not a model file (bad magic)", 0);
  uint32_t version = r.u32();
  if (version != kVersion)
    throw ModelIOError("unsupported model version " + std::to_string(version) +
                           " (expected " + std::to_string(kVersion) + ")",
                       4);
  r.u64();  // config digest; informational

  Model model;
  auto parse_section = [&](uint32_t id, auto fill) {
    uint64_t section_start = r.offset;
    std::string payload = expect_section(r, id);
    std::istringstream buf(payload);
    Reader sr{buf, section_start + 12};
    fill(sr);
    if (sr.offset != section_start + 12 + payload.size())
      throw ModelIOError("section " + std::to_string(id) + " length mismatch",
                         sr.offset);
  };

  parse_section(1, [&](Reader& sr) {
    model.sentence_count = sr.u64();
    model.skipped_sentences = sr.u64();
    model.head_rule_hash = sr.u64();
    model.punct.comma_tags.clear();
    for (uint32_t i = 0, n = sr.u32(); i < n; ++i)
      model.punct.comma_tags.push_back(sr.str());
    model.punct.eval_punct_tags.clear();
    for (uint32_t i = 0, n = sr.u32(); i < n; ++i)
      model.punct.eval_punct_tags.push_back(sr.str());
    for (uint32_t i = 0, n = sr.u32(); i < n; ++i) {
      uint32_t label = sr.u32();
      model.root_label_counts[label] = sr.u64();
    }
  });

  auto read_interner = [&](uint32_t id, Interner& interner) {
    parse_section(id, [&](Reader& sr) {
      uint32_t n = sr.u32();
      for (uint32_t i = 0; i < n; ++i) {
        std::string s = sr.str();
        uint32_t got = interner.intern(s);
        if (got != i)
          throw ModelIOError("duplicate interned string in section " +
                                 std::to_string(id),
                             sr.offset);
      }
    });
  };
  read_interner(2, model.words);
  read_interner(3, model.tags);
  read_interner(4, model.labels);

  parse_section(5, [&](Reader& sr) {
    uint32_t n = sr.u32();
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t m = sr.u32(), p = sr.u32(), h = sr.u32();
      if (model.intern_triple(m, p, h) != i)
        throw ModelIOError("duplicate relation triple", sr.offset);
    }
  });

  uint32_t next_id = 6;
  auto read_dep_tables = [&](DepTables& tables) {
    for (int level = 0; level < 4; ++level)
      parse_section(next_id++, [&](Reader& sr) {
        uint64_t n = sr.u64();
        tables.denom[level].reserve(n);
        for (uint64_t i = 0; i < n; ++i) {
          DepKey k = read_dep_key(sr);
          tables.denom[level][k] = sr.u32();
        }
      });
    for (int level = 0; level < 4; ++level)
      parse_section(next_id++, [&](Reader& sr) {
        uint64_t n = sr.u64();
        tables.numer[level].reserve(n);
        for (uint64_t i = 0; i < n; ++i) {
          DepKey k = read_dep_key(sr);
          uint32_t rel = sr.u32();
          tables.numer[level][ArcKey{k, rel}] = sr.u32();
        }
      });
  };
  read_dep_tables(model.dep);
  read_dep_tables(model.dep_tag_blind);

  for (int level = 0; level < 4; ++level)
    parse_section(next_id++, [&](Reader& sr) {
      uint64_t n = sr.u64();
      model.gap_denom[level].reserve(n);
      for (uint64_t i = 0; i < n; ++i) {
        GapKey k = read_gap_key(sr);
        model.gap_denom[level][k] = sr.u32();
      }
    });
  for (int level = 0; level < 4; ++level)
    parse_section(next_id++, [&](Reader& sr) {
      uint64_t n = sr.u64();
      model.gap_numer[level].reserve(n);
      for (uint64_t i = 0; i < n; ++i) {
        GapKey k = read_gap_key(sr);
        uint8_t tag = sr.u8();
        model.gap_numer[level][GapArcKey{k, tag}] = sr.u32();
      }
    });

  model.build_indexes();
  return model;
}

Model Model::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load(in);
}

}  // namespace lexdep
