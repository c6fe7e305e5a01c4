#ifndef SYLPIPE_TESTS_RANDOM_MODELS_H_
#define SYLPIPE_TESTS_RANDOM_MODELS_H_

#include <random>

#include "sylpipe/depparse.h"
#include "sylpipe/ner.h"
#include "test_util.h"

namespace sylpipe::testing {

inline depparse::TransitionSystem PoolSystem() {
  std::vector<std::string> labels = RelationPool();
  labels.push_back("root");
  return depparse::TransitionSystem(labels);
}

// Parser with Gaussian weights over the features seen along random
// transition walks through `sentences`.
inline depparse::ParserModel RandomParserModel(std::mt19937_64& rng,
                                               const std::vector<Sentence>& sentences,
                                               const depparse::TransitionSystem& system,
                                               bool use_ner) {
  FeatureAlphabet alphabet;
  std::vector<std::string> features;
  for (const Sentence& s : sentences) {
    depparse::ParserState state(static_cast<int>(s.size()));
    for (;;) {
      depparse::ExtractFeatures(s, state, use_ner, features);
      for (const std::string& f : features) alphabet.FindOrAdd(f);
      const auto options = depparse::DecodingTransitions(state, system);
      if (options.empty()) break;
      depparse::ApplyTransition(state, options[rng() % options.size()], system);
    }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> weights(static_cast<size_t>(alphabet.size()) * system.num_classes());
  for (double& w : weights) w = normal(rng);
  return depparse::ParserModel(system, std::move(alphabet), std::move(weights), use_ner);
}

// NER tagger with Gaussian emission weights over the features of
// `sentence` and transition weights that favour every I-X label, so that
// only the BIO mask keeps the output valid.
inline ner::NerTagger RandomNerTagger(std::mt19937_64& rng, const Sentence& sentence) {
  const seqlabel::FeatureExtractor extractor(seqlabel::ParseTemplates(ner::DefaultTemplates(false)));
  const std::vector<std::string> labels = ner::CanonicalLabels();
  const int L = static_cast<int>(labels.size());
  FeatureAlphabet alphabet;
  std::vector<std::string> features;
  for (int i = 0; i < static_cast<int>(sentence.size()); ++i) {
    extractor.Extract(sentence, i, features);
    for (const std::string& f : features) alphabet.FindOrAdd(f);
  }
  std::normal_distribution<double> normal(0.0, 3.0);
  std::vector<double> emission(static_cast<size_t>(alphabet.size()) * L);
  for (double& w : emission) w = normal(rng);
  std::vector<double> transition(static_cast<size_t>(L + 1) * L);
  for (int p = 0; p <= L; ++p) {
    for (int y = 0; y < L; ++y) transition[p * L + y] = labels[y][0] == 'I' ? 20.0 : normal(rng);
  }
  seqlabel::LinearModel model(labels, extractor);
  model.SetWeights(std::move(alphabet), std::move(emission), std::move(transition));
  return ner::NerTagger(std::move(model));
}

// Random sentence with POS tags on every token.
inline Sentence RandomTaggedSentence(std::mt19937_64& rng, int max_len) {
  Sentence s = RandomSentence(rng, max_len);
  for (Token& t : s.tokens) t.pos_tag = PosPool()[rng() % PosPool().size()];
  return s;
}

}  // namespace sylpipe::testing

#endif  // SYLPIPE_TESTS_RANDOM_MODELS_H_
