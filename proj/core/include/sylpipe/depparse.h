#ifndef SYLPIPE_DEPPARSE_H_
#define SYLPIPE_DEPPARSE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sylpipe/annotation.h"
#include "sylpipe/errors.h"
#include "sylpipe/perceptron.h"

// Greedy arc-eager dependency parsing with an averaged-perceptron classifier.
namespace sylpipe::depparse {

inline constexpr std::string_view kRootLabel = "root";
inline constexpr std::string_view kFallbackLabel = "dep";

enum class TransitionType : uint8_t { kShift, kLeftArc, kRightArc, kReduce };

struct Transition {
  TransitionType type = TransitionType::kShift;
  int label = -1;  // index into the relation alphabet; -1 for SHIFT/REDUCE

  static Transition Shift() { return {TransitionType::kShift, -1}; }
  static Transition Reduce() { return {TransitionType::kReduce, -1}; }
  static Transition LeftArc(int label) { return {TransitionType::kLeftArc, label}; }
  static Transition RightArc(int label) { return {TransitionType::kRightArc, label}; }
  friend bool operator==(const Transition&, const Transition&) = default;
};

// Relation alphabet plus the dense class numbering used by the classifier:
// SHIFT, LEFT-ARC(0..L-1), RIGHT-ARC(0..L-1), REDUCE. Class order is also the
// tie-break order when scores are equal.
class TransitionSystem {
 public:
  TransitionSystem() = default;
  // Labels are sorted and de-duplicated.
  explicit TransitionSystem(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  int num_labels() const { return static_cast<int>(labels_.size()); }
  int num_classes() const { return 2 + 2 * num_labels(); }
  int LabelIndex(std::string_view label) const;  // -1 if absent
  int root_label() const { return root_label_; }  // -1 if "root" is absent

  int ClassOf(Transition t) const;
  Transition FromClass(int cls) const;
  std::string Name(Transition t) const;

 private:
  std::vector<std::string> labels_;
  int root_label_ = -1;
};

struct Arc {
  int head = 0;
  int dependent = 0;
  int label = -1;
  friend bool operator==(const Arc&, const Arc&) = default;
};

// Stack of token indices (bottom is the root 0) and a buffer, which in the
// arc-eager system is always the suffix [buffer_front, n] of the sentence.
class ParserState {
 public:
  explicit ParserState(int sentence_length);

  int length() const { return n_; }
  const std::vector<int>& stack() const { return stack_; }
  int buffer_front() const { return front_; }
  bool BufferEmpty() const { return front_ > n_; }
  std::vector<int> Buffer() const;

  // i-th element from the stack top / buffer front, or -1 past the end.
  int StackAt(int i) const {
    return i < static_cast<int>(stack_.size()) ? stack_[stack_.size() - 1 - i] : -1;
  }
  int BufferAt(int i) const { return front_ + i <= n_ ? front_ + i : -1; }

  int head(int token) const { return heads_[token]; }  // -1 if unattached
  int label(int token) const { return labels_[token]; }
  bool HasHead(int token) const { return heads_[token] >= 0; }
  int LeftmostChild(int token) const { return leftmost_[token]; }
  int RightmostChild(int token) const { return rightmost_[token]; }
  int LeftValency(int token) const { return left_count_[token]; }
  int RightValency(int token) const { return right_count_[token]; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  void Shift();
  void Reduce() { stack_.pop_back(); }
  void AddArc(int head, int dependent, int label);
  void PopStack() { stack_.pop_back(); }
  void AdvanceBuffer() { ++front_; }
  void PushStack(int token) { stack_.push_back(token); }

 private:
  int n_;
  std::vector<int> stack_;
  int front_ = 1;
  std::vector<int> heads_, labels_, leftmost_, rightmost_, left_count_, right_count_;
  std::vector<Arc> arcs_;
};

// Arc-eager preconditions: SHIFT iff the buffer is non-empty; LEFT-ARC iff the
// stack top is not the root, has no head, and the buffer is non-empty;
// RIGHT-ARC iff the buffer and stack are non-empty; REDUCE iff the stack top
// has a head. Arc transitions are returned for every label.
std::vector<Transition> LegalTransitions(const ParserState& state, const TransitionSystem& system);

// The subset the parser actually chooses from, which keeps its output a
// single tree: "root" only on the arc from token 0, and at most one such arc.
std::vector<Transition> DecodingTransitions(const ParserState& state,
                                            const TransitionSystem& system);

// Throws ContractError if `t` is not in LegalTransitions(state).
void ApplyTransition(ParserState& state, Transition t, const TransitionSystem& system);

class NonProjectiveError : public Error {
 public:
  NonProjectiveError(Arc a, Arc b);
  Arc first() const { return first_; }
  Arc second() const { return second_; }

 private:
  Arc first_, second_;
};

// Gold heads of a sentence, 1-based: heads[i] for token i (heads[0] = -1).
std::vector<int> GoldHeads(const Sentence& sentence);

// Returns a pair of crossing arcs, or nothing for a projective tree.
std::optional<std::pair<Arc, Arc>> FindCrossingArcs(const std::vector<int>& heads);
bool IsProjective(const std::vector<int>& heads);

// Lifts non-projective arcs to the grandparent until the tree is projective.
// Labels are kept. Returns the number of lifts.
int Projectivize(Sentence& sentence);

// Canonical arc-eager transition sequence rebuilding the gold tree: LEFT-ARC
// when possible, then RIGHT-ARC, then REDUCE when the stack top is finished,
// otherwise SHIFT; trailing REDUCEs empty the stack down to the root.
// Throws NonProjectiveError for crossing arcs and Error for missing heads,
// missing labels or labels outside the alphabet.
std::vector<Transition> StaticOracle(const Sentence& sentence, const TransitionSystem& system);

// Feature strings at a parser state. NER templates are appended only when
// `use_ner` is set.
void ExtractFeatures(const Sentence& sentence, const ParserState& state, bool use_ner,
                     std::vector<std::string>& out);
// Template names ("S0n", ...) of the NER templates; every NER feature string
// starts with one of them followed by '='.
const std::vector<std::string>& NerTemplateNames();
std::string_view TemplateOf(std::string_view feature);

class ParserModel {
 public:
  ParserModel() = default;
  ParserModel(TransitionSystem system, FeatureAlphabet alphabet, std::vector<double> weights,
              bool use_ner);

  // Sets head and dep_label of every token. Unattached tokens at the end are
  // attached to the root's dependent with the "dep" label.
  void Parse(Sentence& sentence) const;

  // Greedy choice among DecodingTransitions; returns the class id.
  int Predict(const Sentence& sentence, const ParserState& state,
              std::vector<std::string>& scratch) const;

  const TransitionSystem& system() const { return system_; }
  const FeatureAlphabet& alphabet() const { return alphabet_; }
  bool use_ner() const { return use_ner_; }
  double weight(int feature, int cls) const {
    return weights_[static_cast<size_t>(feature) * system_.num_classes() + cls];
  }

  void Save(std::ostream& out) const;
  static ParserModel Load(std::istream& in);
  void SaveFile(const std::string& path) const;
  static ParserModel LoadFile(const std::string& path);

 private:
  TransitionSystem system_;
  FeatureAlphabet alphabet_;
  std::vector<double> weights_;
  bool use_ner_ = false;
};

// Finishes a state the parser stopped in: every token without a head is
// attached to the root's dependent with kFallbackLabel (or, if the root has
// none, the first such token becomes the root's dependent).
void AttachLeftovers(Sentence& sentence, const ParserState& state, const TransitionSystem& system);

enum class NonProjectivePolicy { kSkip, kLift };

struct ParserTrainingOptions {
  int epochs = 10;
  uint64_t seed = 1;
  bool use_ner = false;
  NonProjectivePolicy non_projective = NonProjectivePolicy::kSkip;
  std::function<void(int epoch, double accuracy)> on_epoch;
};

struct ParserTrainingStats {
  int sentences_used = 0;
  int skipped_non_projective = 0;
  int skipped_malformed = 0;
  int lifted_arcs = 0;
};

// Perceptron updates along static-oracle state sequences. Throws
// TrainingError on an empty treebank, missing heads or labels, missing NER
// labels with use_ner, or when no sentence survives filtering.
ParserModel TrainParser(const std::vector<Sentence>& treebank,
                        const ParserTrainingOptions& options = {},
                        ParserTrainingStats* stats = nullptr);

}  // namespace sylpipe::depparse

#endif  // SYLPIPE_DEPPARSE_H_
