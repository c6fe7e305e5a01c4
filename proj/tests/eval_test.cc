#include "sylpipe/eval.h"

#include <gtest/gtest.h>

#include <random>

#include "sylpipe/errors.h"
#include "sylpipe/ner.h"
#include "test_util.h"
#include "toy_models.h"

namespace sylpipe::eval {
namespace {

using Words = std::vector<std::vector<std::string>>;
using Labels = std::vector<std::vector<std::string>>;

Sentence Example() { return FromSixColumn(ReadFile(testing::DataPath("example_sentence.conll")))[0]; }

TEST(PrfTest, FromCounts) {
  const PRF prf = PRF::FromCounts(1, 2, 3);
  EXPECT_DOUBLE_EQ(prf.precision, 0.5);
  EXPECT_DOUBLE_EQ(prf.recall, 1.0 / 3);
  EXPECT_DOUBLE_EQ(prf.f1, 0.4);
  const PRF zero = PRF::FromCounts(0, 0, 0);
  EXPECT_EQ(zero.precision, 0.0);
  EXPECT_EQ(zero.f1, 0.0);
}

TEST(SegmentationF1Test, Fixtures) {
  const PRF same = SegmentationF1(Words{{"a_b", "c"}}, Words{{"a_b", "c"}});
  EXPECT_EQ(same.f1, 1.0);
  const PRF none = SegmentationF1(Words{{"a_b", "c"}}, Words{{"a", "b_c"}});
  EXPECT_EQ(none.correct, 0);
  EXPECT_EQ(none.predicted, 2);
  EXPECT_EQ(none.f1, 0.0);
  const PRF partial = SegmentationF1(Words{{"a_b", "c", "d"}}, Words{{"a_b", "c_d"}});
  EXPECT_EQ(partial.correct, 1);
  EXPECT_EQ(partial.predicted, 2);
  EXPECT_EQ(partial.gold, 3);
  EXPECT_DOUBLE_EQ(partial.precision, 1.0 / 2);
  EXPECT_DOUBLE_EQ(partial.recall, 1.0 / 3);
  EXPECT_DOUBLE_EQ(partial.f1, 2.0 / 5);
}

TEST(SegmentationF1Test, SentenceBoundariesMayDifferButSyllablesMayNot) {
  EXPECT_EQ(SegmentationF1(Words{{"a_b", "c"}, {"d"}}, Words{{"a_b"}, {"c", "d"}}).f1, 1.0);
  EXPECT_THROW(SegmentationF1(Words{{"a_b"}}, Words{{"a_c"}}), AlignmentError);
  EXPECT_THROW(SegmentationF1(Words{{"a_b"}}, Words{{"a"}}), AlignmentError);
}

TEST(SegmentationF1Test, SwappingSidesSwapsPrecisionAndRecall) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> syllables;
    const int n = testing::Uniform(rng, 1, 12);
    for (int i = 0; i < n; ++i) syllables.push_back(testing::SyllablePool()[rng() % 5]);
    auto random_words = [&] {
      std::vector<std::string> words = {syllables[0]};
      for (int i = 1; i < n; ++i) {
        if (testing::Coin(rng)) words.back() += "_" + syllables[i];
        else words.push_back(syllables[i]);
      }
      return words;
    };
    const Words a = {random_words()}, b = {random_words()};
    const PRF ab = SegmentationF1(a, b), ba = SegmentationF1(b, a);
    EXPECT_DOUBLE_EQ(ab.precision, ba.recall);
    EXPECT_DOUBLE_EQ(ab.recall, ba.precision);
    EXPECT_DOUBLE_EQ(ab.f1, ba.f1);
  }
}

TEST(TaggingAccuracyTest, Fixtures) {
  const std::vector<std::string> gold = {"N", "V", "A", "N", "V", "A", "N", "V", "A"};
  std::vector<std::string> pred = gold;
  EXPECT_EQ(TaggingAccuracy(gold, pred), 1.0);
  pred[4] = "E";
  EXPECT_DOUBLE_EQ(TaggingAccuracy(gold, pred), 8.0 / 9);
  EXPECT_EQ(TaggingAccuracy(gold, std::vector<std::string>(9, "X")), 0.0);
  EXPECT_THROW(TaggingAccuracy(gold, std::vector<std::string>(8, "N")), AlignmentError);
}

TEST(ChunkF1Test, Fixtures) {
  const std::vector<std::string> gold = ner::LabelsFromSpans({{"PER", 2, 2}, {"ORG", 6, 8}}, 9);
  const ChunkScores same = ChunkF1(Labels{gold}, Labels{gold});
  EXPECT_EQ(same.micro.f1, 1.0);

  const ChunkScores half = ChunkF1(Labels{gold}, Labels{ner::LabelsFromSpans({{"PER", 2, 2}}, 9)});
  EXPECT_EQ(half.micro.precision, 1.0);
  EXPECT_EQ(half.micro.recall, 0.5);
  EXPECT_DOUBLE_EQ(half.micro.f1, 2.0 / 3);
  EXPECT_EQ(half.per_type.at("ORG").recall, 0.0);
  EXPECT_EQ(half.per_type.at("PER").f1, 1.0);

  const ChunkScores off = ChunkF1(Labels{gold}, Labels{ner::LabelsFromSpans({{"PER", 2, 2}, {"ORG", 6, 7}}, 9)});
  EXPECT_EQ(off.micro.correct, 1);
  EXPECT_EQ(off.micro.predicted, 2);
  EXPECT_EQ(off.micro.gold, 2);
  EXPECT_EQ(off.per_type.at("ORG").correct, 0);

  EXPECT_THROW(ChunkF1(Labels{{"I-PER"}}, Labels{{"O"}}), ContractError);
  EXPECT_THROW(ChunkF1(Labels{{"O"}}, Labels{{"O", "O"}}), AlignmentError);
}

TEST(ChunkF1Test, ExampleSentenceScoresPerfectly) {
  const Sentence s = Example();
  EXPECT_EQ(ChunkF1(std::vector<Sentence>{s}, std::vector<Sentence>{s}).micro.f1, 1.0);
}

TEST(ChunkF1Test, MicroEqualsPooledCountsAndIsSymmetric) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Labels gold, pred;
    for (int s = 0; s < 4; ++s) {
      const int n = testing::Uniform(rng, 0, 10);
      gold.push_back(testing::RandomBio(rng, n));
      pred.push_back(testing::RandomBio(rng, n));
    }
    const ChunkScores scores = ChunkF1(gold, pred);
    int64_t correct = 0, predicted = 0, total = 0;
    for (const auto& [type, prf] : scores.per_type) {
      correct += prf.correct;
      predicted += prf.predicted;
      total += prf.gold;
    }
    const PRF pooled = PRF::FromCounts(correct, predicted, total);
    EXPECT_EQ(scores.micro.correct, correct);
    EXPECT_DOUBLE_EQ(scores.micro.f1, pooled.f1);
    const ChunkScores swapped = ChunkF1(pred, gold);
    EXPECT_DOUBLE_EQ(swapped.micro.precision, scores.micro.recall);
    EXPECT_DOUBLE_EQ(swapped.micro.f1, scores.micro.f1);
  }
}

TEST(AttachmentTest, Fixtures) {
  const Sentence gold = Example();
  EXPECT_EQ(ScoreAttachment({gold}, {gold}).las, 1.0);
  Sentence moved = gold;
  moved[0].head = 5;
  const AttachmentScores a = ScoreAttachment({gold}, {moved});
  EXPECT_DOUBLE_EQ(a.uas, 8.0 / 9);
  EXPECT_EQ(a.token_count, 9);
  Sentence relabeled = gold;
  relabeled[2].dep_label = "nmod";
  const AttachmentScores b = ScoreAttachment({gold}, {relabeled});
  EXPECT_EQ(b.uas, 1.0);
  EXPECT_DOUBLE_EQ(b.las, 8.0 / 9);
  Sentence unparsed = gold;
  unparsed[0].head.reset();
  EXPECT_DOUBLE_EQ(ScoreAttachment({gold}, {unparsed}).uas, 8.0 / 9);
  Sentence shorter = gold;
  shorter.tokens.pop_back();
  EXPECT_THROW(ScoreAttachment({gold}, {shorter}), AlignmentError);
  Sentence renamed = gold;
  renamed[0].form = "Bà";
  EXPECT_THROW(ScoreAttachment({gold}, {renamed}), AlignmentError);
}

TEST(AttachmentTest, LasNeverExceedsUas) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<int> heads = testing::RandomHeads(rng, testing::Uniform(rng, 1, 10));
    const Sentence gold = testing::TreeSentence(rng, heads);
    Sentence pred = gold;
    for (Token& t : pred.tokens) {
      if (testing::Coin(rng, 0.3)) t.head = testing::Uniform(rng, 0, static_cast<int>(gold.size()));
      if (testing::Coin(rng, 0.3)) t.dep_label = "adv";
    }
    const AttachmentScores s = ScoreAttachment({gold}, {pred});
    EXPECT_LE(s.las, s.uas);
  }
}

TEST(MedianTest, OddEvenAndEmpty) {
  EXPECT_EQ(Median({3, 1, 2}), 2);
  EXPECT_EQ(Median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(Median({5}), 5);
  EXPECT_THROW(Median({}), ContractError);
}

TEST(ThroughputTest, RejectsEmptyInput) {
  const pipeline::Pipeline p = testing::ToyPipeline({pipeline::AnnotatorKind::kWseg});
  EXPECT_THROW(BenchmarkThroughput(p, "", 3), ContractError);
  EXPECT_THROW(BenchmarkThroughput(p, "a b", 0), ContractError);
}

TEST(ThroughputTest, CountsWordsAndOrdersStages) {
  std::string text;
  for (int i = 0; i < 200; ++i) {
    text += "Ông Nguyễn Khắc Chúc đang làm việc tại Đại học Quốc gia Hà Nội.\n";
  }
  const pipeline::Pipeline wseg = testing::ToyPipeline({pipeline::AnnotatorKind::kWseg});
  const pipeline::Pipeline full = testing::ToyPipeline(pipeline::AllAnnotators());
  const Throughput a = BenchmarkThroughput(wseg, text, 5);
  const Throughput b = BenchmarkThroughput(full, text, 3);
  EXPECT_EQ(a.words, 200 * 9);
  EXPECT_EQ(a.runs.size(), 5u);
  EXPECT_EQ(a.words_per_second, Median(a.runs));
  EXPECT_GE(a.words_per_second, b.words_per_second);
  EXPECT_EQ(BenchmarkThroughput(full, text, 1, 2).words, b.words);
}

TEST(AnnotateLinesTest, WorkersPreserveOrderAndOutput) {
  const pipeline::Pipeline full = testing::ToyPipeline(pipeline::AllAnnotators());
  std::string text;
  for (const Sentence& s : testing::ToyCorpus()) text += ToSegmentedLine(s) + "\n";
  for (char& c : text) {
    if (c == '_') c = ' ';
  }
  const std::vector<Document> one = AnnotateLines(full, text, 1);
  const std::vector<Document> many = AnnotateLines(full, text, 3);
  ASSERT_EQ(one.size(), many.size());
  for (size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].ToString(), many[i].ToString());
}

TEST(ReportTest, Formats) {
  Report r;
  r.Add("f1", 2.0 / 3);
  r.Add("tokens", int64_t{9});
  r.Add("task", std::string("ner"));
  EXPECT_EQ(r.KeyValue(), "f1=0.666667\ntokens=9\ntask=ner\n");
  EXPECT_EQ(r.Text(), "f1      0.666667\ntokens  9\ntask    ner\n");
  Report p;
  p.AddPrf("seg", PRF::FromCounts(1, 2, 3));
  EXPECT_EQ(p.entries().size(), 6u);
  EXPECT_EQ(p.entries()[2], (std::pair<std::string, std::string>{"seg.f1", "0.4"}));
}

}  // namespace
}  // namespace sylpipe::eval
