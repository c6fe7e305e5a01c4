#ifndef SYLPIPE_WSEG_H_
#define SYLPIPE_WSEG_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sylpipe/annotation.h"

// Sentence splitting, syllable tokenization and word segmentation.
//
// Segmentation runs in two passes. A greedy left-to-right longest match
// against the lexicon proposes words; learned transformation rules then flip
// individual syllable boundaries between "join" and "split". Rules are
// applied in their learned order, each one scanning the sentence left to
// right and seeing the effect of its own earlier applications.
namespace sylpipe::wseg {

using SyllableSequence = std::vector<std::string>;

// Normalizes `raw_text` to NFC, splits it into syllables and groups them into
// sentences. Punctuation and symbols become separate syllables (except '.',
// ',', '-', '\'' and '/' between two alphanumeric characters, as in "3.5" or
// "COVID-19"). A sentence ends after ". ! ? … ..." plus any trailing closing
// punctuation when the next syllable follows whitespace and starts with an
// upper-case letter or a digit. A '.' after a known abbreviation or a single
// upper-case initial never ends a sentence.
std::vector<SyllableSequence> SplitAndTokenize(std::string_view raw_text);

inline constexpr int kUnknownSyllable = -1;
inline constexpr int kBeforeStart = -2;
inline constexpr int kAfterEnd = -3;

class SyllableVocab {
 public:
  int Intern(std::string_view syllable);
  int Find(std::string_view syllable) const;
  const std::string& Name(int id) const { return names_[id]; }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const { return std::hash<std::string_view>()(s); }
  };
  std::unordered_map<std::string, int, Hash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
};

// Known words as syllable-id sequences, stored in a trie.
class Lexicon {
 public:
  void Add(std::span<const int> syllables);
  bool Contains(std::span<const int> syllables) const;
  // Syllable count of the longest entry that starts at ids[start]; 0 if none.
  int LongestMatch(std::span<const int> ids, size_t start) const;

  size_t size() const { return entries_; }
  int max_word_length() const { return max_length_; }
  // Every entry, as syllable-id sequences in insertion order.
  const std::vector<std::vector<int>>& words() const { return words_; }

 private:
  int Child(int node, int syllable) const;

  std::unordered_map<uint64_t, int> edges_;
  std::vector<uint8_t> terminal_{0};
  std::vector<std::vector<int>> words_;
  size_t entries_ = 0;
  int max_length_ = 0;
};

enum class RuleAction : uint8_t { kSplit = 0, kJoin = 1 };

// One condition slot of a rule template. Offsets are relative to the
// boundary between syllables b and b+1: syllable offset 0 is syllable b,
// offset 1 is syllable b+1. Decision offsets index neighbouring boundaries.
enum class AtomKind : uint8_t {
  kSyllable,     // syllable identity
  kCapShape,     // text::CapShape of the syllable
  kLexiconPair,  // 1 if syllables (b+o, b+o+1) form a two-syllable lexicon word
  kDecision,     // current join(1)/split(0) decision at boundary b+o
};

struct RuleAtom {
  AtomKind kind;
  int offset;
  friend bool operator==(const RuleAtom&, const RuleAtom&) = default;
};

inline constexpr int kMaxRuleAtoms = 4;

struct RuleTemplate {
  std::vector<RuleAtom> atoms;

  // e.g. "syl@0 syl@1 dec@-1"
  std::string Name() const;
  static RuleTemplate Parse(std::string_view name);
  friend bool operator==(const RuleTemplate&, const RuleTemplate&) = default;
};

// The template inventory for a window radius: conditions on syllable
// identities, capitalization and lexicon membership of up to `radius`
// syllables on each side of a boundary, plus neighbouring decisions.
std::vector<RuleTemplate> DefaultRuleTemplates(int window_radius);

struct TransformationRule {
  int template_id = 0;
  // One value per template atom; syllables are vocabulary ids.
  std::array<int, kMaxRuleAtoms> values{};
  RuleAction action = RuleAction::kJoin;
  // Net training-error reduction when the rule was learned.
  int score = 0;
};

struct SegmenterOptions {
  int window_radius = 2;
  int max_rules = 1000;
};

struct SegmenterTrainingLog {
  int boundaries = 0;
  int baseline_errors = 0;
  // Corpus boundary-error count after each accepted rule.
  std::vector<int> errors_after_rule;
};

class SegmenterModel {
 public:
  SegmenterModel() = default;

  // Segments one sentence's syllables into words ("_"-joined forms).
  Sentence Segment(std::span<const std::string> syllables) const;

  // Boundary decisions (1 = join syllables i and i+1) for the lexicon-only
  // pass and for the full model.
  std::vector<uint8_t> BaselineBoundaries(std::span<const std::string> syllables) const;
  std::vector<uint8_t> Boundaries(std::span<const std::string> syllables) const;

  int window_radius() const { return window_radius_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const SyllableVocab& vocab() const { return vocab_; }
  const std::vector<RuleTemplate>& templates() const { return templates_; }
  const std::vector<TransformationRule>& rules() const { return rules_; }
  std::string DescribeRule(const TransformationRule& rule) const;

  // Line-oriented text format; see README.
  void Save(std::ostream& out) const;
  static SegmenterModel Load(std::istream& in);
  void SaveFile(const std::string& path) const;
  static SegmenterModel LoadFile(const std::string& path);

  // Internal representation shared by segmentation and training.
  struct Encoded {
    std::vector<int> ids;
    std::vector<uint8_t> caps;
    std::vector<uint8_t> lexicon_pair;  // size n-1
  };
  Encoded Encode(std::span<const std::string> syllables) const;
  std::vector<uint8_t> LongestMatch(const Encoded& sentence) const;
  void ApplyRules(const Encoded& sentence, std::vector<uint8_t>& decisions) const;

 private:
  friend SegmenterModel TrainSegmenter(const std::vector<std::vector<std::string>>&,
                                       const SegmenterOptions&, SegmenterTrainingLog*);
  void RebuildRuleIndex();

  SyllableVocab vocab_;
  Lexicon lexicon_;
  int window_radius_ = 2;
  std::vector<RuleTemplate> templates_;
  std::vector<TransformationRule> rules_;

  struct StaticKey {
    int template_id;
    std::array<int, kMaxRuleAtoms> values;
    friend bool operator==(const StaticKey&, const StaticKey&) = default;
  };
  struct StaticKeyHash {
    size_t operator()(const StaticKey& k) const;
  };
  friend class SegmenterTrainer;
  StaticKey StaticKeyAt(int template_id, const Encoded& sentence, int boundary) const;
  int AtomValue(const RuleAtom& atom, const Encoded& sentence,
                const std::vector<uint8_t>& decisions, int boundary) const;
  std::unordered_map<StaticKey, std::vector<int>, StaticKeyHash> rule_index_;
};

// Learns a segmenter from gold sentences (each a list of '_'-joined words).
// The lexicon holds every gold word; rules are then added greedily, each
// round picking the rule with the largest net boundary-error reduction
// (ties: first candidate found scanning the corpus left to right), until no
// rule has a positive score or max_rules is reached.
// Throws TrainingError on an empty corpus.
SegmenterModel TrainSegmenter(const std::vector<std::vector<std::string>>& gold,
                              const SegmenterOptions& options = {},
                              SegmenterTrainingLog* log = nullptr);

// Joins syllables according to boundary decisions.
Sentence WordsFromBoundaries(std::span<const std::string> syllables,
                             const std::vector<uint8_t>& decisions);

// Gold boundary decisions of a segmented sentence, with its syllables.
std::vector<uint8_t> GoldBoundaries(const std::vector<std::string>& words,
                                    std::vector<std::string>* syllables);

}  // namespace sylpipe::wseg

#endif  // SYLPIPE_WSEG_H_
