#include "cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "sylpipe/annotation.h"
#include "sylpipe/pipeline.h"
#include "sylpipe/text.h"
#include "test_util.h"

namespace sylpipe::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kExampleText = "Ông Nguyễn Khắc Chúc đang làm việc tại Đại học Quốc gia Hà Nội.";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::path(::testing::TempDir()) / "sylpipe_cli_test";
    fs::remove_all(root_);
    fs::create_directories(root_);
    models_ = (root_ / "models").string();
    const Result r = Invoke({"train", "all", "-fin", testing::DataPath("toy_corpus.conll"), "-models", models_});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string Path(const std::string& name) { return (root_ / name).string(); }
  static std::string Input(const std::string& name, const std::string& contents) {
    WriteFile(Path(name), contents);
    return Path(name);
  }

  static inline fs::path root_;
  static inline std::string models_;
};

TEST_F(CliTest, TrainAllWritesModelsAndLogs) {
  for (const char* f : {"wseg.model", "pos.model", "ner.model", "parse.model", "parse-noner.model"}) {
    EXPECT_TRUE(fs::exists(fs::path(models_) / f)) << f;
  }
  EXPECT_TRUE(fs::exists(fs::path(models_) / "all.log"));
}

TEST_F(CliTest, AnnotateReproducesExampleTable) {
  const std::string fin = Input("example.txt", std::string(kExampleText) + "\n");
  const std::string fout = Path("example.out");
  const Result r = Invoke({"-fin", fin, "-fout", fout, "-models", models_});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(ReadFile(fout), ReadFile(testing::DataPath("example_sentence.conll")));
  const Result stdout_run = Invoke({"annotate", "--fin", fin, "--models", models_});
  EXPECT_EQ(stdout_run.out, ReadFile(fout));
}

TEST_F(CliTest, AnnotateMatchesLibraryOutput) {
  std::string text;
  for (const Sentence& s : testing::ToyCorpus()) {
    std::string line = ToSegmentedLine(s);
    for (char& c : line) {
      if (c == '_') c = ' ';
    }
    text += line + "\n";
  }
  const std::string fin = Input("toy.txt", text);
  const Result r = Invoke({"-fin", fin, "-models", models_, "-workers", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const pipeline::Pipeline p =
      pipeline::Pipeline::Build(pipeline::AllAnnotators(), pipeline::ModelPaths::InDirectory(models_));
  std::vector<Sentence> all;
  for (std::string_view line : text::Split(text, '\n')) {
    for (Sentence& s : p.Annotate(std::string(line)).sentences) all.push_back(std::move(s));
  }
  EXPECT_EQ(r.out, ToSixColumn(all));
}

TEST_F(CliTest, SegmentationOnly) {
  const std::string fin = Input("wseg.txt", std::string(kExampleText) + "\n");
  const Result r = Invoke({"-fin", fin, "-annotators", "wseg", "-models", models_});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::vector<Sentence> s = FromSixColumn(r.out);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].size(), 9u);
  EXPECT_FALSE(s[0][1].pos_tag.has_value());
  EXPECT_EQ(s[0][1].form, "Nguyễn_Khắc_Chúc");
}

TEST_F(CliTest, PrerequisitesAreReported) {
  const std::string fin = Input("parse.txt", std::string(kExampleText) + "\n");
  const Result r = Invoke({"-fin", fin, "-annotators", "parse", "-models", models_});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("note:"), std::string::npos);
}

TEST_F(CliTest, ErrorExitCodes) {
  const std::string fout = Path("never.out");
  EXPECT_EQ(Invoke({"-fin", Path("missing.txt"), "-fout", fout, "-models", models_}).code, kExitIo);
  EXPECT_FALSE(fs::exists(fout));
  const std::string fin = Input("ok.txt", "a b\n");
  EXPECT_EQ(Invoke({"-fin", fin, "-annotators", "lemma", "-models", models_}).code, kExitConfig);
  EXPECT_EQ(Invoke({"-fin", fin, "-models", Path("no-models")}).code, kExitModel);
  EXPECT_EQ(Invoke({"annotate"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"train", "pos", "-fin", Input("bad.conll", "1\ta\tN\n2\tb\n"), "-models", Path("m2")}).code,
            kExitData);
  EXPECT_EQ(Invoke({"train", "ner", "-fin", Input("empty.conll", ""), "-models", Path("m3")}).code,
            kExitTraining);
}

TEST_F(CliTest, TrainAndEvalPos) {
  const std::string dir = Path("pos_models");
  const Result train = Invoke({"train", "pos", "-fin", testing::DataPath("toy_corpus.conll"), "-models", dir});
  ASSERT_EQ(train.code, kExitOk) << train.err;
  EXPECT_TRUE(fs::exists(fs::path(dir) / "pos.log"));
  const Result ev = Invoke({"eval", "pos", "-gold", testing::DataPath("toy_corpus.conll"), "-models", dir,
                         "-format", "kv"});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const size_t at = ev.out.find("accuracy=");
  ASSERT_NE(at, std::string::npos) << ev.out;
  EXPECT_GE(std::stod(ev.out.substr(at + 9)), 0.99);
}

TEST_F(CliTest, EvalWithPredictionFile) {
  const std::string gold = testing::DataPath("example_sentence.conll");
  const Result same = Invoke({"eval", "parse", "-gold", gold, "-pred", gold, "-format", "kv"});
  ASSERT_EQ(same.code, kExitOk) << same.err;
  EXPECT_NE(same.out.find("uas=1\n"), std::string::npos) << same.out;
  const Result ner = Invoke({"eval", "ner", "-gold", gold, "-pred", gold});
  EXPECT_EQ(ner.code, kExitOk);
  const std::string shorter = Input("short.conll", "1\tÔng\tNc\tO\t0\troot\n");
  EXPECT_EQ(Invoke({"eval", "parse", "-gold", gold, "-pred", shorter}).code, kExitData);
  EXPECT_EQ(Invoke({"eval", "srl", "-gold", gold, "-pred", gold}).code, kExitConfig);
}

TEST_F(CliTest, BenchPrintsOneLinePerStage) {
  const Result r = Invoke({"bench", "-synthetic-words", "2000", "-reps", "1", "-models", models_});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<std::string> stages;
  for (std::string_view line : text::Split(r.out, '\n')) {
    if (line.empty() || line.find('\t') == std::string_view::npos) continue;
    stages.emplace_back(line.substr(0, line.find('\t')));
  }
  ASSERT_GE(stages.size(), 4u);
  EXPECT_EQ(std::vector<std::string>(stages.end() - 4, stages.end()),
            (std::vector<std::string>{"wseg", "wseg+pos", "wseg+pos+ner", "wseg+pos+ner+parse(ner)"}));
}

TEST_F(CliTest, ModelDirectoryFromEnvironment) {
  const std::string fin = Input("env.txt", std::string(kExampleText) + "\n");
  ::setenv(kModelsEnv, models_.c_str(), 1);
  const Result r = Invoke({"-fin", fin});
  ::unsetenv(kModelsEnv);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, ReadFile(testing::DataPath("example_sentence.conll")));
}

TEST(NormalizeFlagsTest, RewritesSingleDashLongFlags) {
  EXPECT_EQ(NormalizeFlags({"-fin", "in.txt", "--fout", "x", "-h", "-", "-3", "train"}),
            (std::vector<std::string>{"--fin", "in.txt", "--fout", "x", "-h", "-", "-3", "train"}));
}

}  // namespace
}  // namespace sylpipe::cli
