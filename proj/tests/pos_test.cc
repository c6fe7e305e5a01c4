#include "sylpipe/pos.h"

#include <gtest/gtest.h>

#include <sstream>

#include "sylpipe/errors.h"
#include "sylpipe/eval.h"
#include "test_util.h"

namespace sylpipe::pos {
namespace {

const PosTagger& ToyTagger() {
  static const PosTagger tagger = TrainPosTagger(testing::ToyCorpus());
  return tagger;
}

TEST(PosTaggerTest, ToyCorpusTrainingAccuracy) {
  const std::vector<Sentence> gold = testing::ToyCorpus();
  std::vector<Sentence> predicted;
  for (const Sentence& s : gold) predicted.push_back(ToyTagger().Tagged(s));
  EXPECT_GE(eval::TaggingAccuracy(gold, predicted), 0.99);
}

TEST(PosTaggerTest, TagsExampleSentence) {
  Sentence s;
  for (const char* f : {"Ông", "Nguyễn_Khắc_Chúc", "đang", "làm_việc", "tại", "Đại_học",
                        "Quốc_gia", "Hà_Nội", "."}) {
    s.Add(f);
  }
  ToyTagger().Tag(s);
  std::vector<std::string> tags;
  for (const Token& t : s.tokens) tags.push_back(*t.pos_tag);
  EXPECT_EQ(tags, (std::vector<std::string>{"Nc", "Np", "R", "V", "E", "N", "N", "Np", "CH"}));
}

TEST(PosTaggerTest, TagsOnlyPosField) {
  Sentence s;
  Token& t = s.Add("Hà_Nội");
  t.ner_label = "B-LOC";
  t.head = 0;
  t.dep_label = "root";
  const Sentence tagged = ToyTagger().Tagged(s);
  ASSERT_TRUE(tagged[0].pos_tag.has_value());
  Sentence expected = s;
  expected[0].pos_tag = tagged[0].pos_tag;
  EXPECT_EQ(tagged, expected);
}

TEST(PosTaggerTest, EmptySentenceAndUnknownWords) {
  Sentence empty;
  ToyTagger().Tag(empty);
  EXPECT_TRUE(empty.empty());
  Sentence s;
  s.Add("xyzzy");
  s.Add(".");
  ToyTagger().Tag(s);
  EXPECT_TRUE(s[0].pos_tag.has_value());
  EXPECT_EQ(*s[1].pos_tag, "CH");
}

TEST(PosTaggerTest, TagsetIsSortedTrainingTags) {
  const auto& tagset = ToyTagger().tagset();
  EXPECT_TRUE(std::is_sorted(tagset.begin(), tagset.end()));
  EXPECT_NE(std::find(tagset.begin(), tagset.end(), "Np"), tagset.end());
}

TEST(PosTaggerTest, SingleTokenCorpus) {
  Sentence s;
  s.Add("a").pos_tag = "N";
  const PosTagger tagger = TrainPosTagger({s});
  Sentence probe;
  probe.Add("b");
  tagger.Tag(probe);
  EXPECT_EQ(*probe[0].pos_tag, "N");
}

TEST(PosTaggerTest, RejectsBadCorpora) {
  EXPECT_THROW(TrainPosTagger({}), TrainingError);
  Sentence s;
  s.Add("a");
  EXPECT_THROW(TrainPosTagger({s}), TrainingError);
}

TEST(PosTaggerTest, DeterministicAndPersistent) {
  const std::vector<Sentence> corpus = testing::ToyCorpus();
  std::ostringstream a, b;
  TrainPosTagger(corpus).model().Save(a);
  TrainPosTagger(corpus).model().Save(b);
  EXPECT_EQ(a.str(), b.str());

  const std::string path = ::testing::TempDir() + "/pos_test.model";
  ToyTagger().SaveFile(path);
  const PosTagger loaded = PosTagger::LoadFile(path);
  for (const Sentence& s : corpus) EXPECT_EQ(loaded.Tagged(s), ToyTagger().Tagged(s));
  EXPECT_THROW(PosTagger::LoadFile(::testing::TempDir() + "/missing.model"), ModelError);
}

}  // namespace
}  // namespace sylpipe::pos
