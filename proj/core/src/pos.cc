#include "sylpipe/pos.h"

#include <algorithm>
#include <set>

#include "sylpipe/errors.h"

namespace sylpipe::pos {

std::vector<std::string_view> DefaultTemplates() {
  return {
      "bias",
      "form@-2", "form@-1", "form@0", "form@+1", "form@+2",
      "form@-1|form@0", "form@0|form@+1",
      "prefix1@0", "prefix2@0", "prefix3@0", "prefix4@0",
      "suffix1@0", "suffix2@0", "suffix3@0", "suffix4@0",
      "cap@0", "digit@0", "hyphen@0",
      "first@0", "last@0",
  };
}

void PosTagger::Tag(Sentence& sentence) const {
  if (sentence.empty()) return;
  seqlabel::DecodeResult result = model_.Decode(sentence);
  for (size_t i = 0; i < sentence.size(); ++i) {
    sentence.tokens[i].pos_tag = model_.labels()[result.labels[i]];
  }
}

PosTagger PosTagger::LoadFile(const std::string& path) {
  return PosTagger(seqlabel::LinearModel::LoadFile(path));
}

PosTagger TrainPosTagger(const std::vector<Sentence>& corpus, const PosTrainingOptions& options) {
  if (corpus.empty()) throw TrainingError("empty POS training corpus");
  std::set<std::string> tagset;
  for (const Sentence& s : corpus) {
    for (const Token& t : s.tokens) {
      if (!t.pos_tag) throw TrainingError("token '" + t.form + "' has no POS tag");
      tagset.insert(*t.pos_tag);
    }
  }
  if (tagset.empty()) throw TrainingError("POS training corpus has no tokens");
  std::vector<std::string> labels(tagset.begin(), tagset.end());

  std::vector<seqlabel::FeatureTemplate> templates;
  if (options.templates.empty()) {
    std::vector<std::string_view> d = DefaultTemplates();
    templates = seqlabel::ParseTemplates(d);
  } else {
    for (const std::string& d : options.templates) templates.push_back(seqlabel::FeatureTemplate::Parse(d));
  }

  std::vector<seqlabel::LabeledSentence> examples;
  examples.reserve(corpus.size());
  for (const Sentence& s : corpus) {
    seqlabel::LabeledSentence ex;
    ex.sentence = &s;
    for (const Token& t : s.tokens) {
      auto it = std::lower_bound(labels.begin(), labels.end(), *t.pos_tag);
      ex.labels.push_back(static_cast<int>(it - labels.begin()));
    }
    examples.push_back(std::move(ex));
  }

  seqlabel::PerceptronOptions popts;
  popts.epochs = options.epochs;
  popts.shuffle_seed = options.seed;
  popts.on_epoch = options.on_epoch;
  return PosTagger(seqlabel::TrainAveragedPerceptron(
      std::move(labels), seqlabel::FeatureExtractor(std::move(templates)), examples, popts));
}

}  // namespace sylpipe::pos
