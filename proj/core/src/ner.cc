#include "sylpipe/ner.h"

#include <algorithm>
#include <random>

#include "sylpipe/errors.h"
#include "sylpipe/perceptron.h"
#include "sylpipe/text.h"

namespace sylpipe::ner {
namespace {

enum class Prefix { kOutside, kBegin, kInside };

struct ParsedLabel {
  Prefix prefix = Prefix::kOutside;
  std::string_view type;
};

bool IsKnownType(std::string_view type) {
  return std::find(kEntityTypes.begin(), kEntityTypes.end(), type) != kEntityTypes.end();
}

bool TryParse(std::string_view label, ParsedLabel& out) {
  if (label == "O") {
    out = {Prefix::kOutside, {}};
    return true;
  }
  if (label.size() < 3 || label[1] != '-' || (label[0] != 'B' && label[0] != 'I')) return false;
  out.prefix = label[0] == 'B' ? Prefix::kBegin : Prefix::kInside;
  out.type = label.substr(2);
  return IsKnownType(out.type);
}

ParsedLabel ParseOrThrow(std::string_view label) {
  ParsedLabel p;
  if (!TryParse(label, p)) throw FormatError("unknown BIO label '" + std::string(label) + "'");
  return p;
}

}  // namespace

std::vector<std::string> CanonicalLabels() {
  std::vector<std::string> labels = {"O"};
  for (std::string_view t : kEntityTypes) {
    labels.push_back("B-" + std::string(t));
    labels.push_back("I-" + std::string(t));
  }
  return labels;
}

bool IsValidBio(std::span<const std::string> labels) {
  std::string_view open;
  for (const std::string& l : labels) {
    ParsedLabel p;
    if (!TryParse(l, p)) return false;
    if (p.prefix == Prefix::kInside && p.type != open) return false;
    open = p.prefix == Prefix::kOutside ? std::string_view() : p.type;
  }
  return true;
}

std::vector<std::string> RepairBio(std::span<const std::string> labels) {
  std::vector<std::string> out(labels.begin(), labels.end());
  std::string_view open;
  for (std::string& l : out) {
    ParsedLabel p = ParseOrThrow(l);
    if (p.prefix == Prefix::kInside && p.type != open) {
      l = "B-" + std::string(p.type);
      p = ParseOrThrow(l);
    }
    open = p.prefix == Prefix::kOutside ? std::string_view() : p.type;
  }
  return out;
}

std::vector<EntitySpan> ExtractEntities(std::span<const std::string> labels) {
  if (!IsValidBio(labels)) throw ContractError("invalid BIO sequence; repair it first");
  std::vector<EntitySpan> spans;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    ParsedLabel p = ParseOrThrow(labels[i]);
    if (p.prefix == Prefix::kBegin) {
      spans.push_back({std::string(p.type), i + 1, i + 1});
    } else if (p.prefix == Prefix::kInside) {
      spans.back().end = i + 1;
    }
  }
  return spans;
}

std::vector<std::string> NerLabels(const Sentence& sentence) {
  std::vector<std::string> labels;
  labels.reserve(sentence.size());
  for (const Token& t : sentence.tokens) labels.emplace_back(t.ner_or_outside());
  return labels;
}

std::vector<EntitySpan> ExtractEntities(const Sentence& sentence) {
  return ExtractEntities(NerLabels(sentence));
}

std::vector<std::string> LabelsFromSpans(const std::vector<EntitySpan>& spans, int length) {
  std::vector<std::string> labels(length, "O");
  for (const EntitySpan& s : spans) {
    if (s.start < 1 || s.end < s.start || s.end > length) throw ContractError("span out of range");
    labels[s.start - 1] = "B-" + s.type;
    for (int i = s.start + 1; i <= s.end; ++i) labels[i - 1] = "I-" + s.type;
  }
  return labels;
}

std::vector<uint8_t> BioTransitionMask(const std::vector<std::string>& labels) {
  const size_t L = labels.size();
  std::vector<ParsedLabel> parsed;
  for (const std::string& l : labels) parsed.push_back(ParseOrThrow(l));
  std::vector<uint8_t> mask((L + 1) * L, 1);
  for (size_t prev = 0; prev <= L; ++prev) {
    for (size_t y = 0; y < L; ++y) {
      if (parsed[y].prefix != Prefix::kInside) continue;
      const bool ok = prev > 0 && parsed[prev - 1].prefix != Prefix::kOutside &&
                      parsed[prev - 1].type == parsed[y].type;
      mask[prev * L + y] = ok;
    }
  }
  return mask;
}

Sentence MergeNameSyllables(const Sentence& sentence) {
  Sentence out;
  const size_t n = sentence.size();
  for (size_t i = 0; i < n;) {
    const Token& t = sentence.tokens[i];
    const std::string_view label = t.ner_or_outside();
    if (label != "B-PER" && label != "I-PER") {
      Token copy = t;
      copy.index = static_cast<int>(out.size()) + 1;
      out.tokens.push_back(std::move(copy));
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < n && sentence.tokens[j].ner_or_outside() == "I-PER") ++j;
    if (j == i + 1) {
      Token copy = t;
      copy.index = static_cast<int>(out.size()) + 1;
      copy.ner_label = "B-PER";
      out.tokens.push_back(std::move(copy));
    } else {
      std::string form = t.form;
      for (size_t k = i + 1; k < j; ++k) form += "_" + sentence.tokens[k].form;
      Token& merged = out.Add(std::move(form));
      merged.pos_tag = t.pos_tag;
      merged.ner_label = "B-PER";
    }
    i = j;
  }
  // Syllable-level heads no longer point at the right tokens.
  if (out.size() != n) {
    for (Token& tok : out.tokens) {
      tok.head.reset();
      tok.dep_label.reset();
    }
  }
  return out;
}

std::vector<Sentence> ReplaceGoldPosWithPredicted(std::vector<Sentence> corpus,
                                                  const pos::PosTagger& tagger) {
  for (Sentence& s : corpus) tagger.Tag(s);
  return corpus;
}

TrainDevSplit SplitTrainDev(const std::vector<Sentence>& corpus, size_t dev_size, uint64_t seed) {
  std::vector<int> order(corpus.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::mt19937_64 rng(seed);
  DeterministicShuffle(order, rng);
  std::vector<uint8_t> is_dev(corpus.size(), 0);
  for (size_t k = 0; k < std::min(dev_size, order.size()); ++k) is_dev[order[k]] = 1;
  TrainDevSplit split;
  for (size_t i = 0; i < corpus.size(); ++i) {
    (is_dev[i] ? split.dev : split.train).push_back(corpus[i]);
  }
  return split;
}

std::vector<std::string> ParseGazetteer(std::string_view contents) {
  std::vector<std::string> entries;
  for (std::string_view line : text::Split(contents, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> words = text::SplitFields(line);
    if (words.empty()) continue;
    std::string entry;
    for (size_t i = 0; i < words.size(); ++i) {
      if (i > 0) entry += '_';
      entry += words[i];
    }
    entries.push_back(text::NormalizeNfc(entry));
  }
  return entries;
}

std::vector<std::string_view> DefaultTemplates(bool with_gazetteer) {
  std::vector<std::string_view> t = pos::DefaultTemplates();
  for (std::string_view d : {"pos@-2", "pos@-1", "pos@0", "pos@+1", "pos@+2", "pos@-1|pos@0",
                             "pos@0|pos@+1", "form@0|pos@0"}) {
    t.push_back(d);
  }
  if (with_gazetteer) {
    for (std::string_view d : {"gaz@-1", "gaz@0", "gaz@+1"}) t.push_back(d);
  }
  return t;
}

NerTagger::NerTagger(seqlabel::LinearModel model) : model_(std::move(model)) {
  for (const std::string& l : model_.labels()) {
    ParsedLabel p;
    if (!TryParse(l, p)) throw ModelError("NER model has non-BIO label '" + l + "'");
  }
  mask_ = BioTransitionMask(model_.labels());
}

void NerTagger::Tag(Sentence& sentence) const {
  if (sentence.empty()) return;
  seqlabel::DecodeResult result = model_.Decode(sentence, mask_);
  for (size_t i = 0; i < sentence.size(); ++i) {
    sentence.tokens[i].ner_label = model_.labels()[result.labels[i]];
  }
}

NerTagger NerTagger::LoadFile(const std::string& path) {
  return NerTagger(seqlabel::LinearModel::LoadFile(path));
}

NerTagger TrainNerTagger(const std::vector<Sentence>& corpus, const NerTrainingOptions& options) {
  if (corpus.empty()) throw TrainingError("empty NER training corpus");
  const std::vector<std::string> labels = CanonicalLabels();
  std::vector<seqlabel::LabeledSentence> examples;
  for (const Sentence& s : corpus) {
    for (const Token& t : s.tokens) {
      if (!t.pos_tag) throw TrainingError("token '" + t.form + "' has no POS tag");
    }
    std::vector<std::string> gold;
    try {
      gold = RepairBio(NerLabels(s));
    } catch (const FormatError& e) {
      throw TrainingError(e.what());
    }
    seqlabel::LabeledSentence ex;
    ex.sentence = &s;
    for (const std::string& g : gold) {
      ex.labels.push_back(static_cast<int>(std::find(labels.begin(), labels.end(), g) - labels.begin()));
    }
    examples.push_back(std::move(ex));
  }

  std::vector<std::string_view> d = DefaultTemplates(!options.gazetteer.empty());
  seqlabel::FeatureExtractor extractor(seqlabel::ParseTemplates(d), options.gazetteer);
  seqlabel::PerceptronOptions popts;
  popts.epochs = options.epochs;
  popts.shuffle_seed = options.seed;
  popts.conjunction_count = options.conjunction_count;
  popts.on_epoch = options.on_epoch;
  return NerTagger(seqlabel::TrainAveragedPerceptron(labels, std::move(extractor), examples, popts,
                                                     BioTransitionMask(labels)));
}

}  // namespace sylpipe::ner
