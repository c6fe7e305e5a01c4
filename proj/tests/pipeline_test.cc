#include "sylpipe/pipeline.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "sylpipe/errors.h"
#include "sylpipe/ner.h"
#include "test_util.h"
#include "toy_models.h"

namespace sylpipe::pipeline {
namespace {

using enum AnnotatorKind;

constexpr const char* kExampleText = "Ông Nguyễn Khắc Chúc đang làm việc tại Đại học Quốc gia Hà Nội.";
constexpr const char* kParagraph =
    "Ông Nguyễn Khắc Chúc đang làm việc tại Đại học Quốc gia Hà Nội. Bà Lan, vợ ông Chúc, cũng "
    "làm việc tại đây.";

TEST(AnnotatorKindTest, Names) {
  for (AnnotatorKind k : AllAnnotators()) EXPECT_EQ(ParseAnnotatorKind(Name(k)), k);
  EXPECT_THROW(ParseAnnotatorKind("lemma"), ConfigError);
  EXPECT_EQ(ParseAnnotatorList("pos,,wseg"), (std::vector<AnnotatorKind>{kPos, kWseg}));
  EXPECT_THROW(ParseAnnotatorList("wseg,srl"), ConfigError);
}

TEST(ClosureTest, InsertsPrerequisitesInOrder) {
  EXPECT_EQ(PrerequisiteClosure({kWseg}), (std::vector<AnnotatorKind>{kWseg}));
  EXPECT_EQ(PrerequisiteClosure({kParse}), (std::vector<AnnotatorKind>{kWseg, kPos, kParse}));
  EXPECT_EQ(PrerequisiteClosure({kParse, kNer, kWseg, kNer}),
            (std::vector<AnnotatorKind>{kWseg, kPos, kNer, kParse}));
  EXPECT_EQ(PrerequisiteClosure({kNer}), (std::vector<AnnotatorKind>{kWseg, kPos, kNer}));
}

TEST(BuildTest, ReportsAutoInsertedPrerequisites) {
  std::vector<std::string> notes;
  const Pipeline p = Pipeline::FromModels({kParse}, testing::ToyModels(false), true, &notes);
  EXPECT_EQ(p.stages(), (std::vector<AnnotatorKind>{kWseg, kPos, kParse}));
  EXPECT_EQ(notes.size(), 2u);
  EXPECT_FALSE(p.parser_uses_ner());
  notes.clear();
  Pipeline::FromModels({kWseg}, testing::ToyModels(), true, &notes);
  EXPECT_TRUE(notes.empty());
}

TEST(BuildTest, ParserNerSettingMustMatch) {
  EXPECT_TRUE(Pipeline::FromModels(AllAnnotators(), testing::ToyModels(true)).parser_uses_ner());
  EXPECT_THROW(Pipeline::FromModels(AllAnnotators(), testing::ToyModels(false)), ConfigError);
  EXPECT_THROW(Pipeline::FromModels({kParse}, testing::ToyModels(true)), ConfigError);
  EXPECT_FALSE(Pipeline::FromModels(AllAnnotators(), testing::ToyModels(false), false).parser_uses_ner());
  PipelineModels missing = testing::ToyModels();
  missing.pos.reset();
  EXPECT_THROW(Pipeline::FromModels({kPos}, missing), ConfigError);
}

class ModelDirTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::path(::testing::TempDir()) / "sylpipe_pipeline_models";
    std::filesystem::create_directories(dir_);
    const PipelineModels m = testing::ToyModels();
    paths_ = ModelPaths::InDirectory(dir_.string());
    m.wseg->SaveFile(paths_.wseg);
    m.pos->SaveFile(paths_.pos);
    m.ner->SaveFile(paths_.ner);
    m.parser->SaveFile(paths_.parse);
    testing::ToyModels(false).parser->SaveFile(paths_.parse_noner);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  ModelPaths paths_;
};

TEST_F(ModelDirTest, BuildsFromFilesAndSelectsParser) {
  const Pipeline with = Pipeline::Build(AllAnnotators(), paths_, true);
  EXPECT_TRUE(with.parser_uses_ner());
  const Pipeline without = Pipeline::Build(AllAnnotators(), paths_, false);
  EXPECT_FALSE(without.parser_uses_ner());
  EXPECT_FALSE(Pipeline::Build({kParse}, paths_, true).parser_uses_ner());
  const Pipeline memory = testing::ToyPipeline(AllAnnotators());
  EXPECT_EQ(with.Annotate(kExampleText).ToString(), memory.Annotate(kExampleText).ToString());
}

TEST_F(ModelDirTest, MissingModelNamesAnnotator) {
  std::filesystem::remove(paths_.ner);
  try {
    Pipeline::Build({kNer}, paths_);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("ner:", 0), 0u) << e.what();
  }
  EXPECT_NO_THROW(Pipeline::Build({kPos}, paths_));
  WriteFile(paths_.pos, "garbage");
  try {
    Pipeline::Build({kPos}, paths_);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("pos:", 0), 0u) << e.what();
  }
}

TEST(AnnotateTest, ExampleSentenceThroughFullPipeline) {
  const Document doc = testing::ToyPipeline(AllAnnotators()).Annotate(kExampleText);
  EXPECT_EQ(doc.ToString(), ReadFile(testing::DataPath("example_sentence.conll")));
  EXPECT_EQ(doc.WordCount(), 9u);
}

TEST(AnnotateTest, EmptyDocument) {
  const Document doc = testing::ToyPipeline(AllAnnotators()).Annotate("");
  EXPECT_TRUE(doc.sentences.empty());
  EXPECT_EQ(doc.ToString(), "");
}

TEST(AnnotateTest, TwoSentenceParagraph) {
  const Pipeline p = testing::ToyPipeline(AllAnnotators());
  const Document doc = p.Annotate(kParagraph);
  ASSERT_EQ(doc.sentences.size(), 2u);
  for (const Sentence& s : doc.sentences) {
    EXPECT_TRUE(IsWellFormedTree(s));
    EXPECT_TRUE(ValidateSentence(s).empty());
  }
  // Each sentence is annotated as if it were alone.
  Document second;
  second.sentences.push_back(doc.sentences[1]);
  for (Token& t : second.sentences[0].tokens) t = Token{t.index, t.form};
  p.Annotate(second);
  EXPECT_EQ(second.sentences[0], doc.sentences[1]);
}

TEST(AnnotateTest, StagesOnlyFillTheirOwnFields) {
  const std::vector<std::vector<AnnotatorKind>> prefixes = {
      {kWseg}, {kWseg, kPos}, {kWseg, kPos, kNer}, AllAnnotators()};
  std::vector<Document> docs;
  for (const auto& kinds : prefixes) docs.push_back(testing::ToyPipeline(kinds).Annotate(kParagraph));
  for (size_t s = 0; s < docs[0].sentences.size(); ++s) {
    for (size_t i = 0; i < docs[0].sentences[s].size(); ++i) {
      const Token& w = docs[0].sentences[s][i];
      const Token& p = docs[1].sentences[s][i];
      const Token& n = docs[2].sentences[s][i];
      const Token& f = docs[3].sentences[s][i];
      EXPECT_FALSE(w.pos_tag || w.ner_label || w.head || w.dep_label);
      EXPECT_EQ(p.form, w.form);
      EXPECT_TRUE(p.pos_tag && !p.ner_label && !p.head);
      EXPECT_EQ(n.pos_tag, p.pos_tag);
      EXPECT_TRUE(n.ner_label && !n.head);
      EXPECT_EQ(f.form, w.form);
      EXPECT_EQ(f.pos_tag, p.pos_tag);
      EXPECT_EQ(f.ner_label, n.ner_label);
      EXPECT_TRUE(f.head && f.dep_label);
    }
  }
}

TEST(AnnotateTest, DeterministicAndIdempotent) {
  const Pipeline p = testing::ToyPipeline(AllAnnotators());
  Document once = p.Annotate(kParagraph);
  const std::string first = once.ToString();
  EXPECT_EQ(p.Annotate(kParagraph).ToString(), first);
  p.Annotate(once);
  EXPECT_EQ(once.ToString(), first);
}

TEST(AnnotateTest, FailsFastNamingStageAndSentence) {
  PipelineModels models = testing::ToyModels(false);
  // A corrupt NER model that cannot score one particular word.
  const seqlabel::LinearModel& good = models.ner->model();
  FeatureAlphabet alphabet;
  const int L = good.num_labels();
  std::vector<double> emission;
  for (int f = 0; f < good.alphabet().size(); ++f) {
    alphabet.FindOrAdd(good.alphabet().name(f));
    for (int y = 0; y < L; ++y) emission.push_back(good.emission_weight(f, y));
  }
  alphabet.FindOrAdd("form@0=BOOM");
  for (int y = 0; y < L; ++y) emission.push_back(std::numeric_limits<double>::quiet_NaN());
  std::vector<double> transition;
  for (int p = -1; p < L; ++p) {
    for (int y = 0; y < L; ++y) transition.push_back(good.transition_weight(p, y));
  }
  seqlabel::LinearModel bad = good;
  bad.SetWeights(std::move(alphabet), std::move(emission), std::move(transition));
  models.ner = std::make_shared<const ner::NerTagger>(std::move(bad));
  const Pipeline p = Pipeline::FromModels(AllAnnotators(), models, false);

  Document doc;
  for (const char* form : {"Hà_Nội", "BOOM", "Huế"}) doc.sentences.emplace_back().Add(form);
  try {
    p.Annotate(doc);
    FAIL() << "expected AnnotationError";
  } catch (const AnnotationError& e) {
    EXPECT_EQ(e.stage(), "ner");
    EXPECT_EQ(e.sentence_index(), 1);
  }
  EXPECT_TRUE(doc.sentences[0][0].ner_label.has_value());
  EXPECT_FALSE(doc.sentences[2][0].ner_label.has_value());
  EXPECT_FALSE(doc.sentences[0][0].head.has_value());
}

}  // namespace
}  // namespace sylpipe::pipeline
