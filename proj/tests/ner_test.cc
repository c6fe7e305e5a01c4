#include "sylpipe/ner.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "sylpipe/errors.h"
#include "sylpipe/eval.h"
#include "sylpipe/pos.h"
#include "random_models.h"
#include "test_util.h"

namespace sylpipe::ner {
namespace {

using Labels = std::vector<std::string>;

// Independent span scan: walks label by label keeping the open entity.
std::vector<EntitySpan> ScanSpans(const Labels& labels) {
  std::vector<EntitySpan> spans;
  for (size_t i = 0; i < labels.size(); ++i) {
    const std::string& l = labels[i];
    if (l == "O") continue;
    const std::string type = l.substr(2);
    if (l[0] == 'B' || spans.empty() || spans.back().end != static_cast<int>(i) ||
        spans.back().type != type) {
      spans.push_back({type, static_cast<int>(i) + 1, static_cast<int>(i) + 1});
    } else {
      spans.back().end = static_cast<int>(i) + 1;
    }
  }
  return spans;
}

Sentence Tokens(std::initializer_list<std::pair<const char*, const char*>> rows) {
  Sentence s;
  for (const auto& [form, label] : rows) {
    Token& t = s.Add(form);
    t.pos_tag = "N";
    t.ner_label = label;
  }
  return s;
}

const NerTagger& ToyTagger() {
  static const NerTagger tagger = TrainNerTagger(testing::ToyCorpus());
  return tagger;
}

TEST(BioTest, CanonicalLabels) {
  EXPECT_EQ(CanonicalLabels(), (Labels{"O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-ORG", "I-ORG",
                                       "B-MISC", "I-MISC"}));
}

TEST(BioTest, Validity) {
  EXPECT_TRUE(IsValidBio(Labels{}));
  EXPECT_TRUE(IsValidBio(Labels{"B-PER", "I-PER", "O", "B-LOC", "B-LOC", "I-LOC"}));
  EXPECT_FALSE(IsValidBio(Labels{"I-PER"}));
  EXPECT_FALSE(IsValidBio(Labels{"O", "I-LOC"}));
  EXPECT_FALSE(IsValidBio(Labels{"B-PER", "I-LOC"}));
  EXPECT_FALSE(IsValidBio(Labels{"B-XYZ"}));
}

TEST(BioTest, Repair) {
  EXPECT_EQ(RepairBio(Labels{"O", "I-LOC", "I-LOC", "B-PER", "I-ORG"}),
            (Labels{"O", "B-LOC", "I-LOC", "B-PER", "B-ORG"}));
  EXPECT_THROW(RepairBio(Labels{"X-PER"}), FormatError);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Labels valid = testing::RandomBio(rng, testing::Uniform(rng, 0, 10));
    EXPECT_EQ(RepairBio(valid), valid);
  }
}

TEST(BioTest, ExtractEntities) {
  const Labels labels = {"B-PER", "I-PER", "O", "B-LOC", "B-LOC", "I-LOC", "O", "B-MISC"};
  EXPECT_EQ(ExtractEntities(labels), (std::vector<EntitySpan>{
                                         {"PER", 1, 2}, {"LOC", 4, 4}, {"LOC", 5, 6}, {"MISC", 8, 8}}));
  EXPECT_THROW(ExtractEntities(Labels{"I-PER"}), ContractError);
}

TEST(BioTest, SpansRoundTripAgainstScan) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = testing::Uniform(rng, 0, 15);
    const Labels labels = testing::RandomBio(rng, n);
    const std::vector<EntitySpan> spans = ExtractEntities(labels);
    ASSERT_EQ(spans, ScanSpans(labels));
    ASSERT_EQ(LabelsFromSpans(spans, n), labels);
  }
}

TEST(BioTest, TransitionMask) {
  const Labels labels = CanonicalLabels();
  const std::vector<uint8_t> mask = BioTransitionMask(labels);
  const int L = static_cast<int>(labels.size());
  ASSERT_EQ(mask.size(), static_cast<size_t>((L + 1) * L));
  for (int prev = -1; prev < L; ++prev) {
    for (int y = 0; y < L; ++y) {
      Labels seq;
      if (prev >= 0 && labels[prev][0] == 'I') seq.push_back("B-" + labels[prev].substr(2));
      if (prev >= 0) seq.push_back(labels[prev]);
      seq.push_back(labels[y]);
      EXPECT_EQ(mask[(prev + 1) * L + y] != 0, IsValidBio(seq)) << prev << " " << y;
    }
  }
}

TEST(MergeNameSyllablesTest, MergesPersonRuns) {
  Sentence s = Tokens({{"Ông", "O"}, {"Nguyễn", "B-PER"}, {"Khắc", "I-PER"}, {"Chúc", "I-PER"},
                       {"và", "O"}, {"Lan", "B-PER"}, {"Hà", "B-LOC"}, {"Nội", "I-LOC"}});
  s[1].pos_tag = "Np";
  for (Token& t : s.tokens) t.head = 1;
  const Sentence merged = MergeNameSyllables(s);
  EXPECT_EQ(merged.Forms(), (std::vector<std::string>{"Ông", "Nguyễn_Khắc_Chúc", "và", "Lan", "Hà", "Nội"}));
  EXPECT_EQ(NerLabels(merged), (Labels{"O", "B-PER", "O", "B-PER", "B-LOC", "I-LOC"}));
  EXPECT_EQ(*merged[1].pos_tag, "Np");
  EXPECT_EQ(merged[5].index, 6);
  for (const Token& t : merged.tokens) EXPECT_FALSE(t.head.has_value());
  EXPECT_TRUE(ValidateSentence(merged).empty());
}

TEST(MergeNameSyllablesTest, PreservesSyllablesAndEntities) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = testing::Uniform(rng, 1, 12);
    const Labels labels = testing::RandomBio(rng, n);
    Sentence s;
    for (int i = 0; i < n; ++i) {
      Token& t = s.Add(testing::SyllablePool()[rng() % testing::SyllablePool().size()]);
      t.ner_label = labels[i];
    }
    const Sentence merged = MergeNameSyllables(s);
    std::vector<std::string> before, after;
    for (const Token& t : s.tokens) before.push_back(t.form);
    for (const Token& t : merged.tokens) {
      for (std::string& syl : SyllablesOf(t.form)) after.push_back(syl);
    }
    ASSERT_EQ(after, before);
    ASSERT_TRUE(IsValidBio(NerLabels(merged)));
    int persons_before = 0, persons_after = 0;
    for (const EntitySpan& e : ExtractEntities(s)) persons_before += e.type == "PER";
    for (const EntitySpan& e : ExtractEntities(merged)) {
      persons_after += e.type == "PER";
      if (e.type == "PER") ASSERT_EQ(e.start, e.end);
    }
    ASSERT_EQ(persons_after, persons_before);
  }
}

TEST(ReplaceGoldPosTest, OverwritesOnlyPosTags) {
  const std::vector<Sentence> corpus = testing::ToyCorpus();
  std::vector<Sentence> garbled = corpus;
  for (Sentence& s : garbled) {
    for (Token& t : s.tokens) t.pos_tag = "ZZ";
  }
  const pos::PosTagger tagger = pos::TrainPosTagger(corpus);
  const std::vector<Sentence> replaced = ReplaceGoldPosWithPredicted(garbled, tagger);
  ASSERT_EQ(replaced.size(), corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(replaced[i], tagger.Tagged(garbled[i]));
    for (size_t j = 0; j < corpus[i].size(); ++j) {
      EXPECT_NE(*replaced[i][j].pos_tag, "ZZ");
      EXPECT_EQ(replaced[i][j].ner_label, corpus[i][j].ner_label);
    }
  }
  EXPECT_TRUE(ReplaceGoldPosWithPredicted({}, tagger).empty());
}

TEST(SplitTrainDevTest, DeterministicOrderedPartition) {
  const std::vector<Sentence> corpus = testing::ToyCorpus();
  const TrainDevSplit a = SplitTrainDev(corpus, 10, 7);
  const TrainDevSplit b = SplitTrainDev(corpus, 10, 7);
  EXPECT_EQ(a.dev, b.dev);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.dev.size(), 10u);
  EXPECT_EQ(a.train.size(), corpus.size() - 10);
  // Both sides are subsequences of the corpus and together cover it.
  size_t ti = 0, di = 0;
  for (const Sentence& s : corpus) {
    if (ti < a.train.size() && a.train[ti] == s) {
      ++ti;
    } else {
      ASSERT_LT(di, a.dev.size());
      ASSERT_EQ(a.dev[di], s);
      ++di;
    }
  }
  EXPECT_EQ(ti, a.train.size());
  EXPECT_EQ(SplitTrainDev(corpus, 1000, 1).dev.size(), corpus.size());
}

TEST(GazetteerTest, ParsesEntries) {
  EXPECT_EQ(ParseGazetteer("Hà Nội\n\n  Việt Nam  \r\nHuế\n"),
            (std::vector<std::string>{"Hà_Nội", "Việt_Nam", "Huế"}));
  EXPECT_TRUE(ParseGazetteer("").empty());
}

TEST(NerTemplatesTest, GazetteerTemplatesOnlyWhenRequested) {
  auto has_gaz = [](const std::vector<std::string_view>& t) {
    return std::any_of(t.begin(), t.end(), [](std::string_view s) { return s.find("gaz@") != s.npos; });
  };
  EXPECT_FALSE(has_gaz(DefaultTemplates(false)));
  EXPECT_TRUE(has_gaz(DefaultTemplates(true)));
}

TEST(NerTaggerTest, ToyCorpusTrainingF1) {
  const std::vector<Sentence> gold = testing::ToyCorpus();
  std::vector<Sentence> predicted = gold;
  for (Sentence& s : predicted) ToyTagger().Tag(s);
  EXPECT_GE(eval::ChunkF1(gold, predicted).micro.f1, 0.95);
}

TEST(NerTaggerTest, ExampleSentenceLabels) {
  Sentence s = FromSixColumn(ReadFile(testing::DataPath("example_sentence.conll")))[0];
  const Labels gold = NerLabels(s);
  for (Token& t : s.tokens) t.ner_label.reset();
  ToyTagger().Tag(s);
  EXPECT_EQ(NerLabels(s), gold);
}

TEST(NerTaggerTest, PunctuationOnlySentenceIsOutside) {
  Sentence s;
  for (const char* f : {".", ",", "."}) s.Add(f).pos_tag = "CH";
  ToyTagger().Tag(s);
  EXPECT_EQ(NerLabels(s), (Labels{"O", "O", "O"}));
}

TEST(NerTaggerTest, OutputIsValidBioForRandomModels) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    Sentence sentence = testing::RandomTaggedSentence(rng, 15);
    testing::RandomNerTagger(rng, sentence).Tag(sentence);
    ASSERT_TRUE(IsValidBio(NerLabels(sentence))) << "trial " << trial;
  }
}

TEST(NerTaggerTest, TrainingRepairsAndValidates) {
  std::vector<Sentence> corpus = {Tokens({{"Hà", "I-LOC"}, {"Nội", "I-LOC"}, {"đẹp", "O"}})};
  const NerTagger tagger = TrainNerTagger(corpus);
  Sentence s = corpus[0];
  tagger.Tag(s);
  EXPECT_EQ(NerLabels(s), (Labels{"B-LOC", "I-LOC", "O"}));

  EXPECT_THROW(TrainNerTagger({}), TrainingError);
  Sentence untagged = corpus[0];
  untagged[0].pos_tag.reset();
  EXPECT_THROW(TrainNerTagger({untagged}), TrainingError);
  EXPECT_THROW(TrainNerTagger({Tokens({{"x", "B-DATE"}})}), TrainingError);
}

TEST(NerTaggerTest, DeterministicAndPersistent) {
  const std::vector<Sentence> corpus = testing::ToyCorpus();
  NerTrainingOptions opts;
  opts.gazetteer = {"Hà_Nội"};
  std::ostringstream a, b;
  TrainNerTagger(corpus, opts).model().Save(a);
  TrainNerTagger(corpus, opts).model().Save(b);
  EXPECT_EQ(a.str(), b.str());

  const std::string path = ::testing::TempDir() + "/ner_test.model";
  ToyTagger().SaveFile(path);
  const NerTagger loaded = NerTagger::LoadFile(path);
  for (Sentence s : corpus) {
    Sentence t = s;
    loaded.Tag(s);
    ToyTagger().Tag(t);
    EXPECT_EQ(s, t);
  }
}

}  // namespace
}  // namespace sylpipe::ner
