#ifndef SYLPIPE_SEQLABEL_H_
#define SYLPIPE_SEQLABEL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sylpipe/annotation.h"
#include "sylpipe/perceptron.h"

// Linear-chain sequence labeling: feature templates, Viterbi decoding, an
// exhaustive decoding oracle and averaged structured-perceptron training.
// The POS tagger and the NER tagger are both built on this engine.
namespace sylpipe::seqlabel {

enum class Attribute : uint8_t {
  kBias,       // "bias"
  kForm,       // "form@k"
  kPrefix,     // "prefixN@k"  first N code points
  kSuffix,     // "suffixN@k"  last N code points
  kCapShape,   // "cap@k"
  kHasDigit,   // "digit@k"
  kHasHyphen,  // "hyphen@k"
  kFirst,      // "first@k"    token k positions away is sentence-initial
  kLast,       // "last@k"
  kPosTag,     // "pos@k"
  kGazetteer,  // "gaz@k"      form is a gazetteer entry
};

struct TemplateAtom {
  Attribute attribute = Attribute::kBias;
  int offset = 0;
  int length = 0;  // prefix/suffix length
  friend bool operator==(const TemplateAtom&, const TemplateAtom&) = default;
};

// A feature template: one or more atoms joined by '|', e.g. "form@-1|form@0".
// The feature string is the descriptor, '=', then the atom values joined by
// '|'. Positions outside the sentence read as "<s>" / "</s>".
class FeatureTemplate {
 public:
  // Throws ConfigError on an unknown attribute or malformed offset.
  static FeatureTemplate Parse(std::string_view descriptor);

  const std::string& name() const { return name_; }
  const std::vector<TemplateAtom>& atoms() const { return atoms_; }
  bool Uses(Attribute attribute) const;

 private:
  std::string name_;
  std::vector<TemplateAtom> atoms_;
};

std::vector<FeatureTemplate> ParseTemplates(std::span<const std::string_view> descriptors);

class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  explicit FeatureExtractor(std::vector<FeatureTemplate> templates,
                            std::vector<std::string> gazetteer = {});

  // Replaces `out` with the feature strings firing at `position`.
  void Extract(const Sentence& sentence, int position, std::vector<std::string>& out) const;

  const std::vector<FeatureTemplate>& templates() const { return templates_; }
  // Sorted, duplicate-free gazetteer entries.
  const std::vector<std::string>& gazetteer() const { return gazetteer_; }

 private:
  void AppendValue(const Sentence& sentence, int position, const TemplateAtom& atom,
                   std::string& out) const;

  std::vector<FeatureTemplate> templates_;
  std::vector<std::string> gazetteer_;
  std::unordered_set<std::string_view> gazetteer_set_;
};

// Scores of one sentence under a linear-chain model.
struct ScoreLattice {
  int length = 0;
  int num_labels = 0;
  std::vector<double> emission;    // length x num_labels
  std::vector<double> transition;  // (num_labels + 1) x num_labels; row 0 is the start state
  std::vector<uint8_t> legal;      // length x num_labels; empty means all legal
  std::vector<uint8_t> allowed;    // shape of `transition`; empty means all allowed

  ScoreLattice() = default;
  ScoreLattice(int length, int num_labels);

  double Emission(int i, int y) const { return emission[static_cast<size_t>(i) * num_labels + y]; }
  // prev == -1 is the virtual start label.
  double Transition(int prev, int y) const {
    return transition[static_cast<size_t>(prev + 1) * num_labels + y];
  }
  bool IsLegal(int i, int y) const {
    return legal.empty() || legal[static_cast<size_t>(i) * num_labels + y];
  }
  bool IsAllowed(int prev, int y) const {
    return allowed.empty() || allowed[static_cast<size_t>(prev + 1) * num_labels + y];
  }

  // Sum of emission and transition scores, accumulated left to right.
  // Returns -infinity for a sequence that breaks a constraint.
  double SequenceScore(std::span<const int> labels) const;
};

struct DecodeResult {
  std::vector<int> labels;
  double score = 0.0;
};

// Highest-scoring label sequence that respects the lattice constraints. Among
// equal-scoring sequences the lexicographically smallest (by label index) is
// returned. Throws DecodeError if a position has no legal label or no
// sequence satisfies the constraints.
DecodeResult ViterbiDecode(const ScoreLattice& lattice);

// Same contract as ViterbiDecode, by enumerating every sequence. Throws
// DecodeError when there are more than `max_sequences` of them.
DecodeResult BruteForceDecode(const ScoreLattice& lattice, int64_t max_sequences = 1'000'000);

// A pair of base features that fire together, scored as one extra feature.
struct Conjunction {
  int first = 0;
  int second = 0;
  int id = 0;
};

class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::vector<std::string> labels, FeatureExtractor extractor);

  const std::vector<std::string>& labels() const { return labels_; }
  int num_labels() const { return static_cast<int>(labels_.size()); }
  int LabelIndex(std::string_view label) const;
  const FeatureExtractor& extractor() const { return extractor_; }
  const FeatureAlphabet& alphabet() const { return alphabet_; }
  const std::vector<Conjunction>& conjunctions() const { return conjunctions_; }

  double emission_weight(int feature, int label) const {
    return emission_[static_cast<size_t>(feature) * labels_.size() + label];
  }
  double transition_weight(int prev, int label) const {
    return transition_[static_cast<size_t>(prev + 1) * labels_.size() + label];
  }

  // Ids of the known features firing at each position, conjunctions
  // included. Unknown features are dropped (they would score 0).
  std::vector<std::vector<int>> FeatureIds(const Sentence& sentence) const;

  // Replaces the feature alphabet and weights. Emission is alphabet.size() x
  // num_labels, transition (num_labels + 1) x num_labels; throws
  // ConfigError on other shapes. The alphabet is frozen and conjunctions
  // are dropped.
  void SetWeights(FeatureAlphabet alphabet, std::vector<double> emission,
                  std::vector<double> transition);

  ScoreLattice BuildLattice(const Sentence& sentence) const;
  DecodeResult Decode(const Sentence& sentence, const std::vector<uint8_t>& allowed = {}) const;

  // Versioned little-endian container; see README.
  void Save(std::ostream& out) const;
  static LinearModel Load(std::istream& in);
  void SaveFile(const std::string& path) const;
  static LinearModel LoadFile(const std::string& path);

 private:
  friend class PerceptronTrainer;
  void IndexConjunctions();

  std::vector<std::string> labels_;
  FeatureExtractor extractor_;
  FeatureAlphabet alphabet_;
  std::vector<Conjunction> conjunctions_;
  std::unordered_map<int, std::vector<std::pair<int, int>>> conjunctions_by_first_;
  std::vector<double> emission_;
  std::vector<double> transition_;
};

struct PerceptronOptions {
  int epochs = 10;
  uint64_t shuffle_seed = 1;
  bool shuffle = true;
  // When positive, after one epoch the this-many feature pairs that co-fire
  // most often at mistagged positions become conjunction features and
  // training restarts from zero weights.
  int conjunction_count = 0;
  // Called after each epoch with the online token accuracy of that epoch.
  std::function<void(int epoch, double accuracy)> on_epoch;
};

// Structured perceptron over cached feature ids. Updates add 1 to the gold
// emission/transition features and subtract 1 from the predicted ones; the
// returned model carries the average of the weights after every instance.
class PerceptronTrainer {
 public:
  PerceptronTrainer(std::vector<std::string> labels, FeatureExtractor extractor,
                    std::vector<uint8_t> allowed_transitions = {});

  // Extracts the sentence's features, growing the feature alphabet.
  void AddExample(const Sentence& sentence, std::vector<int> gold);
  size_t num_examples() const { return examples_.size(); }

  // One pass over the examples in `order` (indices into the examples).
  // Returns online token accuracy.
  double RunEpoch(const std::vector<int>& order);
  double RunEpoch(std::mt19937_64& rng, bool shuffle);

  // Adds the top-k error co-firing feature pairs as conjunctions (decoding
  // with the current averaged weights) and resets all weights.
  void InduceConjunctions(int k);

  LinearModel AveragedModel() const;
  LinearModel RawModel() const;
  const AveragedWeights& emission_weights() const { return emission_; }
  const AveragedWeights& transition_weights() const { return transition_; }

 private:
  struct Example {
    std::vector<std::vector<int>> base;  // base feature ids per position
    std::vector<std::vector<int>> ids;   // base + conjunctions
    std::vector<int> gold;
  };
  ScoreLattice Lattice(const Example& ex, const std::vector<double>& emission,
                       const std::vector<double>& transition) const;
  void RefreshConjunctionIds();
  LinearModel MakeModel(std::vector<double> emission, std::vector<double> transition) const;

  LinearModel proto_;
  std::vector<uint8_t> allowed_;
  std::vector<Example> examples_;
  AveragedWeights emission_;
  AveragedWeights transition_;
};

struct LabeledSentence {
  const Sentence* sentence = nullptr;
  std::vector<int> labels;
};

// Trains a model from scratch. Deterministic given the corpus order and
// options. Throws TrainingError on an empty corpus or out-of-range labels.
LinearModel TrainAveragedPerceptron(std::vector<std::string> labels, FeatureExtractor extractor,
                                    const std::vector<LabeledSentence>& corpus,
                                    const PerceptronOptions& options,
                                    std::vector<uint8_t> allowed_transitions = {});

}  // namespace sylpipe::seqlabel

#endif  // SYLPIPE_SEQLABEL_H_
