#ifndef SYLPIPE_NER_H_
#define SYLPIPE_NER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sylpipe/annotation.h"
#include "sylpipe/pos.h"
#include "sylpipe/seqlabel.h"

// Named-entity recognition over BIO labels, plus the corpus preprocessing
// used to build realistic NER training data.
namespace sylpipe::ner {

inline constexpr std::array<std::string_view, 4> kEntityTypes = {"PER", "LOC", "ORG", "MISC"};

// "O", then B-/I- for each entity type in kEntityTypes order.
std::vector<std::string> CanonicalLabels();

struct EntitySpan {
  std::string type;
  int start = 0;  // 1-based, inclusive
  int end = 0;    // 1-based, inclusive
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

// True if every label is known and no I-X follows anything but B-X / I-X.
bool IsValidBio(std::span<const std::string> labels);

// Turns every I-X that cannot continue an entity into B-X. Throws
// FormatError on a label outside the BIO alphabet.
std::vector<std::string> RepairBio(std::span<const std::string> labels);

// Maximal B-X (I-X)* runs. Throws ContractError on invalid BIO input.
std::vector<EntitySpan> ExtractEntities(std::span<const std::string> labels);
std::vector<EntitySpan> ExtractEntities(const Sentence& sentence);

// Inverse of ExtractEntities for non-overlapping spans.
std::vector<std::string> LabelsFromSpans(const std::vector<EntitySpan>& spans, int length);

std::vector<std::string> NerLabels(const Sentence& sentence);

// Transition mask for masked decoding over `labels`: I-X may only follow
// B-X or I-X, and never starts a sentence.
std::vector<uint8_t> BioTransitionMask(const std::vector<std::string>& labels);

// Merges each run of PER-labeled syllable tokens (B-PER I-PER*) into one
// token whose form joins the syllables with '_' and whose label is B-PER.
// The merged token keeps the first syllable's POS tag; heads and relations
// of merged tokens are cleared. Indices are renumbered.
Sentence MergeNameSyllables(const Sentence& sentence);

// Overwrites every POS tag with the tagger's prediction.
std::vector<Sentence> ReplaceGoldPosWithPredicted(std::vector<Sentence> corpus,
                                                  const pos::PosTagger& tagger);

// Deterministic train/dev split: `dev_size` sentences sampled with `seed`.
// Both parts keep the corpus order.
struct TrainDevSplit {
  std::vector<Sentence> train;
  std::vector<Sentence> dev;
};
TrainDevSplit SplitTrainDev(const std::vector<Sentence>& corpus, size_t dev_size, uint64_t seed);

// One entry per line; whitespace inside an entry becomes '_'.
std::vector<std::string> ParseGazetteer(std::string_view text);

// POS tagging templates plus POS tags in a +-2 window, POS bigrams and,
// when a gazetteer is used, gazetteer-membership flags.
std::vector<std::string_view> DefaultTemplates(bool with_gazetteer);

struct NerTrainingOptions {
  int epochs = 10;
  uint64_t seed = 1;
  // Number of induced feature-pair conjunctions; 0 disables induction.
  int conjunction_count = 1000;
  std::vector<std::string> gazetteer;
  std::function<void(int epoch, double accuracy)> on_epoch;
};

class NerTagger {
 public:
  NerTagger() = default;
  explicit NerTagger(seqlabel::LinearModel model);

  // Sets every token's NER label; needs POS tags. Output is always valid BIO.
  void Tag(Sentence& sentence) const;

  const seqlabel::LinearModel& model() const { return model_; }
  const std::vector<uint8_t>& transition_mask() const { return mask_; }

  void SaveFile(const std::string& path) const { model_.SaveFile(path); }
  static NerTagger LoadFile(const std::string& path);

 private:
  seqlabel::LinearModel model_;
  std::vector<uint8_t> mask_;
};

// Trains on sentences with POS tags and NER labels. Invalid BIO sequences
// are repaired first. Throws TrainingError on an empty corpus, a missing POS
// tag, or an unknown entity type.
NerTagger TrainNerTagger(const std::vector<Sentence>& corpus,
                         const NerTrainingOptions& options = {});

}  // namespace sylpipe::ner

#endif  // SYLPIPE_NER_H_
