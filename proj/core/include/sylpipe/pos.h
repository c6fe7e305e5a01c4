#ifndef SYLPIPE_POS_H_
#define SYLPIPE_POS_H_

#include <string>
#include <string_view>
#include <vector>

#include "sylpipe/annotation.h"
#include "sylpipe/seqlabel.h"

namespace sylpipe::pos {

// Default tagging templates: forms in a +-2 window, form bigrams around the
// current word, prefixes and suffixes of 1-4 code points, capitalization,
// digit/hyphen flags and sentence-boundary flags.
std::vector<std::string_view> DefaultTemplates();

struct PosTrainingOptions {
  int epochs = 10;
  uint64_t seed = 1;
  // Extra templates replace the defaults when non-empty.
  std::vector<std::string> templates;
  std::function<void(int epoch, double accuracy)> on_epoch;
};

class PosTagger {
 public:
  PosTagger() = default;
  explicit PosTagger(seqlabel::LinearModel model) : model_(std::move(model)) {}

  // Sets every token's POS tag; leaves all other fields alone.
  void Tag(Sentence& sentence) const;
  Sentence Tagged(Sentence sentence) const {
    Tag(sentence);
    return sentence;
  }

  const seqlabel::LinearModel& model() const { return model_; }
  const std::vector<std::string>& tagset() const { return model_.labels(); }

  void SaveFile(const std::string& path) const { model_.SaveFile(path); }
  static PosTagger LoadFile(const std::string& path);

 private:
  seqlabel::LinearModel model_;
};

// Trains on sentences whose tokens all carry POS tags. The tagset is the
// sorted set of tags seen in training. Throws TrainingError on an empty
// corpus or untagged tokens.
PosTagger TrainPosTagger(const std::vector<Sentence>& corpus,
                         const PosTrainingOptions& options = {});

}  // namespace sylpipe::pos

#endif  // SYLPIPE_POS_H_
