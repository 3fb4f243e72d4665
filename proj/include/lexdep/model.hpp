#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "lexdep/distance.hpp"
#include "lexdep/reduction.hpp"

namespace lexdep {

class ModelIOError : public std::runtime_error {
 public:
  ModelIOError(const std::string& msg, uint64_t offset)
      : std::runtime_error(msg + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  uint64_t offset() const { return offset_; }

 private:
  uint64_t offset_;
};

// Maps strings to dense ids. Id 0 is reserved for the root marker.
class Interner {
 public:
  Interner();
  uint32_t intern(const std::string& s);
  std::optional<uint32_t> lookup(const std::string& s) const;
  const std::string& str(uint32_t id) const { return strings_[id]; }
  uint32_t size() const { return static_cast<uint32_t>(strings_.size()); }

 private:
  std::vector<std::string> strings_;
  std::unordered_map<std::string, uint32_t> ids_;
};

constexpr uint32_t kRootId = 0;
constexpr uint32_t kNoField = 0xFFFFFFFFu;

// Key for one co-occurrence context; the four slots hold word/tag ids in a
// per-level layout (see the build_* helpers), unused slots hold kNoField.
struct DepKey {
  uint32_t a = kNoField, b = kNoField, c = kNoField, d = kNoField;
  uint8_t delta = 0;
  bool operator==(const DepKey&) const = default;
  bool operator<(const DepKey& o) const {
    return std::tie(a, b, c, d, delta) < std::tie(o.a, o.b, o.c, o.d, o.delta);
  }
};

struct ArcKey {
  DepKey pair;
  uint32_t relation = 0;
  bool operator==(const ArcKey&) const = default;
  bool operator<(const ArcKey& o) const {
    return std::tie(pair, relation) < std::tie(o.pair, o.relation);
  }
};

struct GapKey {
  uint32_t a = kNoField, b = kNoField, c = kNoField, d = kNoField;
  uint8_t comma = 0;
  bool operator==(const GapKey&) const = default;
  bool operator<(const GapKey& o) const {
    return std::tie(a, b, c, d, comma) < std::tie(o.a, o.b, o.c, o.d, o.comma);
  }
};

struct GapArcKey {
  GapKey context;
  uint8_t tag = 0;
  bool operator==(const GapArcKey&) const = default;
  bool operator<(const GapArcKey& o) const {
    return std::tie(context, tag) < std::tie(o.context, o.tag);
  }
};

uint64_t mix_hash(uint64_t h, uint64_t v);

struct DepKeyHash {
  size_t operator()(const DepKey& k) const {
    uint64_t h = 0xcbf29ce484222325ull;
    h = mix_hash(h, k.a);
    h = mix_hash(h, k.b);
    h = mix_hash(h, k.c);
    h = mix_hash(h, k.d);
    h = mix_hash(h, k.delta);
    return static_cast<size_t>(h);
  }
};
struct ArcKeyHash {
  size_t operator()(const ArcKey& k) const {
    return static_cast<size_t>(mix_hash(DepKeyHash{}(k.pair), k.relation));
  }
};
struct GapKeyHash {
  size_t operator()(const GapKey& k) const {
    uint64_t h = 0x84222325cbf29ce4ull;
    h = mix_hash(h, k.a);
    h = mix_hash(h, k.b);
    h = mix_hash(h, k.c);
    h = mix_hash(h, k.d);
    h = mix_hash(h, k.comma);
    return static_cast<size_t>(h);
  }
};
struct GapArcKeyHash {
  size_t operator()(const GapArcKey& k) const {
    return static_cast<size_t>(mix_hash(GapKeyHash{}(k.context), k.tag));
  }
};

template <typename K, typename H>
using CountTable = std::unordered_map<K, uint32_t, H>;

// The four backoff levels of the dependency model: 1 = both words and tags,
// 2 = modifier word + both tags, 3 = head word + both tags, 4 = tags only.
// In the tag-blind variant tags appear only where the word is absent.
struct DepTables {
  std::array<CountTable<DepKey, DepKeyHash>, 4> denom;
  std::array<CountTable<ArcKey, ArcKeyHash>, 4> numer;
};

struct WordTag {
  uint32_t word = kNoField;
  uint32_t tag = kNoField;
};

struct TrainOptions {
  PunctConfig punct;
  int jobs = 1;
  bool verbose = false;
};

class Model {
 public:
  Interner words, tags, labels;

  DepTables dep;
  DepTables dep_tag_blind;
  std::array<CountTable<GapKey, GapKeyHash>, 4> gap_denom;
  std::array<CountTable<GapArcKey, GapArcKeyHash>, 4> gap_numer;

  uint64_t sentence_count = 0;
  uint64_t skipped_sentences = 0;
  PunctConfig punct;
  uint64_t head_rule_hash = 0;

  std::unordered_map<uint32_t, uint64_t> root_label_counts;

  // Relation triples (modifier, parent, head-child) as label ids.
  uint32_t intern_triple(uint32_t m, uint32_t p, uint32_t h);
  std::optional<uint32_t> lookup_triple(uint32_t m, uint32_t p, uint32_t h) const;
  std::array<uint32_t, 3> triple(uint32_t id) const { return triples_[id]; }
  uint32_t triple_count() const { return static_cast<uint32_t>(triples_.size()); }
  std::optional<uint32_t> lookup_triple(const RelationTriple& r) const;

  // Key builders. Levels are 0-based here (level 0 == the paper's level 1).
  static DepKey dep_key(int level, bool tag_blind, const WordTag& mod,
                        const WordTag& head, uint8_t delta);
  static GapKey gap_key(int level, const WordTag& left, const WordTag& right,
                        bool comma);

  WordTag intern_word_tag(const std::string& word, const std::string& tag);
  WordTag lookup_word_tag(const std::string& word, const std::string& tag) const;

  uint32_t dep_denom(int level, bool tag_blind, const DepKey& key) const;
  uint32_t dep_numer(int level, bool tag_blind, const DepKey& key, uint32_t rel) const;
  uint32_t gap_denom_count(int level, const GapKey& key) const;
  uint32_t gap_numer_count(int level, const GapKey& key, GapTag tag) const;

  // Parent-label candidates for a (modifier label, head-child label) pair;
  // built lazily from the triple inventory after training or loading.
  const std::vector<uint32_t>& parent_candidates(uint32_t mod_label,
                                                 uint32_t head_child_label) const;
  void build_indexes();

  std::string most_frequent_root_label() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static Model load(std::istream& in);
  static Model load_file(const std::string& path);

 private:
  std::vector<std::array<uint32_t, 3>> triples_;
  std::unordered_map<uint64_t, uint32_t> triple_ids_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> parent_index_;
  std::vector<uint32_t> no_parents_;
};

// Accumulates counts from one analyzed sentence into the model.
void count_sentence(Model* model, const Analysis& analysis);

Model train(const std::vector<ParseTree>& treebank, const HeadRuleTable& rules,
            const TrainOptions& opts = {});

// Adds src's counts into dst, remapping ids. Used for sharded training.
void merge_into(Model* dst, const Model& src);

}  // namespace lexdep
