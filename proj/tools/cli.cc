#include "cli.h"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "synthetic.h"
#include "sylpipe/annotation.h"
#include "sylpipe/depparse.h"
#include "sylpipe/errors.h"
#include "sylpipe/eval.h"
#include "sylpipe/ner.h"
#include "sylpipe/pipeline.h"
#include "sylpipe/pos.h"
#include "sylpipe/text.h"
#include "sylpipe/wseg.h"

namespace sylpipe::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string models;
  uint64_t seed = 1;
};

struct AnnotateConfig {
  std::string fin;
  std::string fout;
  std::string annotators = "wseg,pos,ner,parse";
  int workers = 1;
  bool parser_ner = true;
};

struct TrainConfig {
  std::string task;
  std::string fin;
  std::string format = "auto";
  int epochs = 10;
  int max_rules = 1000;
  int window = 2;
  int conjunctions = 1000;
  std::string gazetteer;
  bool merge_names = false;
  bool predicted_pos = false;
  int dev_size = 0;
  std::string ner_features = "auto";
  std::string non_projective = "skip";
};

struct EvalConfig {
  std::string task;
  std::string gold;
  std::string pred;
  std::string format = "text";
  bool gold_pos = false;
  bool parser_ner = true;
};

struct BenchConfig {
  std::string fin;
  std::string annotators = "wseg,pos,ner,parse";
  int reps = 3;
  int workers = 1;
  int64_t synthetic_words = 0;
  bool parser_ner = true;
};

std::string ModelDir(const Common& c) {
  if (!c.models.empty()) return c.models;
  if (const char* env = std::getenv(kModelsEnv); env && *env) return env;
  return "models";
}

void RequireReadable(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is required");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw IoError(what + " not found: " + path);
}

void WriteOrPrint(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    WriteFile(path, contents);
  }
}

std::string AllSixColumn(const std::vector<Document>& docs) {
  std::vector<Sentence> all;
  for (const Document& d : docs) {
    for (const Sentence& s : d.sentences) all.push_back(s);
  }
  return ToSixColumn(all);
}

// ---------------------------------------------------------------------------
// annotate

int RunAnnotate(const Common& common, const AnnotateConfig& cfg, std::ostream& out,
                std::ostream& err) {
  std::vector<pipeline::AnnotatorKind> kinds = pipeline::ParseAnnotatorList(cfg.annotators);
  if (kinds.empty()) throw ConfigError("no annotators requested");
  RequireReadable(cfg.fin, "input file");
  if (cfg.workers < 1) throw ConfigError("-workers must be at least 1");
  std::vector<std::string> notes;
  pipeline::Pipeline p = pipeline::Pipeline::Build(
      kinds, pipeline::ModelPaths::InDirectory(ModelDir(common)), cfg.parser_ner, &notes);
  for (const std::string& n : notes) err << "note: " << n << "\n";
  std::vector<Document> docs = eval::AnnotateLines(p, ReadFile(cfg.fin), cfg.workers);
  WriteOrPrint(cfg.fout, AllSixColumn(docs), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

bool LooksColumnar(const std::string& contents) {
  for (std::string_view line : text::Split(contents, '\n')) {
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    return line.find('\t') != std::string_view::npos;
  }
  return false;
}

std::vector<std::vector<std::string>> SegmentedCorpus(const std::string& path,
                                                      const std::string& format) {
  const std::string contents = ReadFile(path);
  const bool columns = format == "columns" || (format == "auto" && LooksColumnar(contents));
  if (!columns) return ReadSegmentedText(contents);
  std::vector<std::vector<std::string>> out;
  for (const Sentence& s : ReadColumnCorpus(contents).sentences) out.push_back(s.Forms());
  return out;
}

class TrainLog {
 public:
  TrainLog(const std::string& path, std::ostream& out) : file_(path), out_(out) {
    if (!file_) throw IoError("cannot write " + path);
  }
  void Line(const std::string& line) {
    file_ << line << "\n";
    out_ << line << "\n";
  }
  std::function<void(int, double)> EpochCallback(std::string tag) {
    return [this, tag](int epoch, double acc) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s epoch %d training_accuracy %.6f", tag.c_str(), epoch, acc);
      Line(buf);
    };
  }

 private:
  std::ofstream file_;
  std::ostream& out_;
};

void TrainWseg(const std::string& dir, const TrainConfig& cfg, TrainLog& log) {
  auto corpus = SegmentedCorpus(cfg.fin, cfg.format);
  wseg::SegmenterOptions opts;
  opts.max_rules = cfg.max_rules;
  opts.window_radius = cfg.window;
  wseg::SegmenterTrainingLog tlog;
  wseg::SegmenterModel model = wseg::TrainSegmenter(corpus, opts, &tlog);
  log.Line("wseg boundaries " + std::to_string(tlog.boundaries) + " baseline_errors " +
           std::to_string(tlog.baseline_errors));
  for (size_t i = 0; i < tlog.errors_after_rule.size(); ++i) {
    log.Line("wseg rule " + std::to_string(i + 1) + " errors " +
             std::to_string(tlog.errors_after_rule[i]));
  }
  model.SaveFile((fs::path(dir) / "wseg.model").string());
}

std::vector<Sentence> ReadColumns(const std::string& path) {
  return ReadColumnCorpusFile(path).sentences;
}

void TrainPos(const std::string& dir, const std::vector<Sentence>& corpus, const Common& common,
              const TrainConfig& cfg, TrainLog& log) {
  pos::PosTrainingOptions opts;
  opts.epochs = cfg.epochs;
  opts.seed = common.seed;
  opts.on_epoch = log.EpochCallback("pos");
  pos::TrainPosTagger(corpus, opts).SaveFile((fs::path(dir) / "pos.model").string());
}

void TrainNer(const std::string& dir, std::vector<Sentence> corpus, const Common& common,
              const TrainConfig& cfg, TrainLog& log) {
  if (cfg.merge_names) {
    for (Sentence& s : corpus) s = ner::MergeNameSyllables(s);
  }
  if (cfg.predicted_pos) {
    const std::string pos_path = (fs::path(dir) / "pos.model").string();
    if (!fs::exists(pos_path)) throw ModelError("pos: model file not found: " + pos_path);
    corpus = ner::ReplaceGoldPosWithPredicted(std::move(corpus), pos::PosTagger::LoadFile(pos_path));
  }
  std::vector<Sentence> dev;
  if (cfg.dev_size > 0) {
    ner::TrainDevSplit split = ner::SplitTrainDev(corpus, cfg.dev_size, common.seed);
    corpus = std::move(split.train);
    dev = std::move(split.dev);
    log.Line("ner train_sentences " + std::to_string(corpus.size()) + " dev_sentences " +
             std::to_string(dev.size()));
  }
  ner::NerTrainingOptions opts;
  opts.epochs = cfg.epochs;
  opts.seed = common.seed;
  opts.conjunction_count = cfg.conjunctions;
  opts.on_epoch = log.EpochCallback("ner");
  if (!cfg.gazetteer.empty()) {
    RequireReadable(cfg.gazetteer, "gazetteer");
    opts.gazetteer = ner::ParseGazetteer(ReadFile(cfg.gazetteer));
  }
  ner::NerTagger tagger = ner::TrainNerTagger(corpus, opts);
  tagger.SaveFile((fs::path(dir) / "ner.model").string());
  if (!dev.empty()) {
    std::vector<Sentence> predicted = dev;
    for (Sentence& s : predicted) tagger.Tag(s);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", eval::ChunkF1(dev, predicted).micro.f1);
    log.Line(std::string("ner dev_f1 ") + buf);
  }
}

void TrainParse(const std::string& dir, const std::vector<Sentence>& corpus, const Common& common,
                const TrainConfig& cfg, TrainLog& log) {
  bool has_ner = !corpus.empty();
  for (const Sentence& s : corpus) {
    for (const Token& t : s.tokens) has_ner = has_ner && t.ner_label.has_value();
  }
  std::vector<bool> variants;
  if (cfg.ner_features == "on") {
    variants = {true};
  } else if (cfg.ner_features == "off") {
    variants = {false};
  } else if (cfg.ner_features == "both") {
    variants = {true, false};
  } else {
    variants = has_ner ? std::vector<bool>{true, false} : std::vector<bool>{false};
  }
  for (bool use_ner : variants) {
    depparse::ParserTrainingOptions opts;
    opts.epochs = cfg.epochs;
    opts.seed = common.seed;
    opts.use_ner = use_ner;
    opts.non_projective = cfg.non_projective == "lift" ? depparse::NonProjectivePolicy::kLift
                                                      : depparse::NonProjectivePolicy::kSkip;
    const std::string name = use_ner ? "parse" : "parse-noner";
    opts.on_epoch = log.EpochCallback(name);
    depparse::ParserTrainingStats stats;
    depparse::ParserModel model = depparse::TrainParser(corpus, opts, &stats);
    log.Line(name + " sentences_used " + std::to_string(stats.sentences_used) +
             " skipped_non_projective " + std::to_string(stats.skipped_non_projective) +
             " skipped_malformed " + std::to_string(stats.skipped_malformed) + " lifted_arcs " +
             std::to_string(stats.lifted_arcs));
    model.SaveFile((fs::path(dir) / (name + ".model")).string());
  }
}

int RunTrain(const Common& common, const TrainConfig& cfg, std::ostream& out) {
  static const std::vector<std::string> kTasks = {"wseg", "pos", "ner", "parse", "all"};
  if (std::find(kTasks.begin(), kTasks.end(), cfg.task) == kTasks.end()) {
    throw ConfigError("unknown training task '" + cfg.task + "'");
  }
  if (cfg.non_projective != "skip" && cfg.non_projective != "lift") {
    throw ConfigError("-non-projective must be skip or lift");
  }
  RequireReadable(cfg.fin, "training corpus");
  const std::string dir = ModelDir(common);
  fs::create_directories(dir);
  TrainLog log((fs::path(dir) / (cfg.task + ".log")).string(), out);
  try {
    if (cfg.task == "wseg") {
      TrainWseg(dir, cfg, log);
    } else if (cfg.task == "pos") {
      TrainPos(dir, ReadColumns(cfg.fin), common, cfg, log);
    } else if (cfg.task == "ner") {
      TrainNer(dir, ReadColumns(cfg.fin), common, cfg, log);
    } else if (cfg.task == "parse") {
      TrainParse(dir, ReadColumns(cfg.fin), common, cfg, log);
    } else {
      std::vector<Sentence> corpus = ReadColumns(cfg.fin);
      TrainConfig seg = cfg;
      seg.format = "columns";
      TrainWseg(dir, seg, log);
      TrainPos(dir, corpus, common, cfg, log);
      TrainNer(dir, corpus, common, cfg, log);
      TrainParse(dir, corpus, common, cfg, log);
    }
  } catch (const ContractError& e) {
    throw TrainingError(e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

template <typename Model>
Model LoadFor(const std::string& dir, const std::string& file, const std::string& stage) {
  const std::string path = (fs::path(dir) / file).string();
  if (!fs::exists(path)) throw ModelError(stage + ": model file not found: " + path);
  try {
    return Model::LoadFile(path);
  } catch (const Error& e) {
    throw ModelError(stage + ": cannot load " + path + ": " + e.what());
  }
}

std::vector<Sentence> StripTo(const std::vector<Sentence>& gold, bool keep_pos) {
  std::vector<Sentence> out = gold;
  for (Sentence& s : out) {
    for (Token& t : s.tokens) {
      if (!keep_pos) t.pos_tag.reset();
      t.ner_label.reset();
      t.head.reset();
      t.dep_label.reset();
    }
  }
  return out;
}

int RunEval(const Common& common, const EvalConfig& cfg, std::ostream& out) {
  if (cfg.format != "text" && cfg.format != "kv") throw ConfigError("-format must be text or kv");
  RequireReadable(cfg.gold, "gold file");
  if (!cfg.pred.empty()) RequireReadable(cfg.pred, "predicted file");
  const std::string dir = ModelDir(common);
  eval::Report report;
  report.Add("task", cfg.task);

  if (cfg.task == "wseg") {
    auto gold = SegmentedCorpus(cfg.gold, "auto");
    std::vector<std::vector<std::string>> pred;
    if (!cfg.pred.empty()) {
      pred = SegmentedCorpus(cfg.pred, "auto");
    } else {
      auto model = LoadFor<wseg::SegmenterModel>(dir, "wseg.model", "wseg");
      for (const auto& words : gold) {
        std::vector<std::string> syllables;
        for (const std::string& w : words) {
          for (std::string& s : SyllablesOf(w)) syllables.push_back(std::move(s));
        }
        pred.push_back(model.Segment(syllables).Forms());
      }
    }
    report.AddPrf("segmentation", eval::SegmentationF1(gold, pred));
  } else if (cfg.task == "pos" || cfg.task == "ner" || cfg.task == "parse") {
    std::vector<Sentence> gold = ReadColumns(cfg.gold);
    std::vector<Sentence> pred;
    if (!cfg.pred.empty()) {
      pred = ReadColumns(cfg.pred);
    } else {
      const bool keep_pos = cfg.gold_pos && cfg.task != "pos";
      pred = StripTo(gold, keep_pos);
      if (!keep_pos) {
        auto tagger = LoadFor<pos::PosTagger>(dir, "pos.model", "pos");
        for (Sentence& s : pred) tagger.Tag(s);
      }
      const bool ner_for_parse = cfg.task == "parse" && cfg.parser_ner &&
                                 fs::exists(fs::path(dir) / "parse.model") &&
                                 fs::exists(fs::path(dir) / "ner.model");
      if (cfg.task == "ner" || ner_for_parse) {
        auto tagger = LoadFor<ner::NerTagger>(dir, "ner.model", "ner");
        for (Sentence& s : pred) tagger.Tag(s);
      }
      if (cfg.task == "parse") {
        auto parser = LoadFor<depparse::ParserModel>(
            dir, ner_for_parse ? "parse.model" : "parse-noner.model", "parse");
        for (Sentence& s : pred) parser.Parse(s);
        report.Add("parser_ner_features", std::string(ner_for_parse ? "on" : "off"));
      }
    }
    if (cfg.task == "pos") {
      report.Add("accuracy", eval::TaggingAccuracy(gold, pred));
    } else if (cfg.task == "ner") {
      eval::ChunkScores scores = eval::ChunkF1(gold, pred);
      report.AddPrf("micro", scores.micro);
      for (const auto& [type, prf] : scores.per_type) report.AddPrf(type, prf);
    } else {
      eval::AttachmentScores scores = eval::ScoreAttachment(gold, pred);
      report.Add("las", scores.las);
      report.Add("uas", scores.uas);
      report.Add("tokens", scores.token_count);
    }
  } else {
    throw ConfigError("unknown evaluation task '" + cfg.task + "'");
  }
  out << (cfg.format == "kv" ? report.KeyValue() : report.Text());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

int RunBench(const Common& common, const BenchConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<pipeline::AnnotatorKind> kinds =
      pipeline::PrerequisiteClosure(pipeline::ParseAnnotatorList(cfg.annotators));
  if (kinds.empty()) throw ConfigError("no annotators requested");
  if (cfg.reps < 1) throw ConfigError("-reps must be at least 1");
  if (cfg.workers < 1) throw ConfigError("-workers must be at least 1");
  std::string text;
  if (cfg.synthetic_words > 0) {
    text = synthetic::GenerateRawText(cfg.synthetic_words, common.seed);
  } else {
    RequireReadable(cfg.fin, "input file");
    text = ReadFile(cfg.fin);
  }
  const auto paths = pipeline::ModelPaths::InDirectory(ModelDir(common));
  out << "stage\twords_per_second\twords\n";
  std::vector<pipeline::AnnotatorKind> prefix;
  for (pipeline::AnnotatorKind k : kinds) {
    prefix.push_back(k);
    pipeline::Pipeline p = pipeline::Pipeline::Build(prefix, paths, cfg.parser_ner);
    eval::Throughput t = eval::BenchmarkThroughput(p, text, cfg.reps, cfg.workers);
    std::string name;
    for (pipeline::AnnotatorKind s : prefix) {
      if (!name.empty()) name += '+';
      name += pipeline::Name(s);
    }
    if (k == pipeline::AnnotatorKind::kParse) name += p.parser_uses_ner() ? "(ner)" : "(noner)";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", t.words_per_second);
    out << name << "\t" << buf << "\t" << t.words << "\n";
  }
  (void)err;
  return kExitOk;
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ModelError*>(&e)) return kExitModel;
  if (dynamic_cast<const TrainingError*>(&e)) return kExitTraining;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitIo;
  return kExitData;
}

bool IsSubcommand(const std::string& s) {
  return s == "annotate" || s == "train" || s == "eval" || s == "bench";
}

}  // namespace

std::vector<std::string> NormalizeFlags(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const std::string& a : args) {
    if (a.size() > 2 && a[0] == '-' && a[1] != '-' && !std::isdigit(static_cast<unsigned char>(a[1]))) {
      out.push_back("-" + a);
    } else {
      out.push_back(a);
    }
  }
  return out;
}

int RunCli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = NormalizeFlags(raw_args);
  const bool top_help = !args.empty() && (args[0] == "-h" || args[0] == "--help");
  if (!top_help && (args.empty() || !IsSubcommand(args[0]))) args.insert(args.begin(), "annotate");

  CLI::App app{"sylpipe: word segmentation, POS tagging, NER and dependency parsing"};
  app.name("sylpipe");
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--models", common.models,
                    std::string("Model directory (default: $") + kModelsEnv + " or ./models)");
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  };

  AnnotateConfig ann;
  CLI::App* annotate = app.add_subcommand("annotate", "Annotate raw text (one document per line)");
  annotate->add_option("--fin", ann.fin, "Input text file")->required();
  annotate->add_option("--fout", ann.fout, "Output file (default: stdout)");
  annotate->add_option("--annotators", ann.annotators, "Comma-separated annotators")
      ->capture_default_str();
  annotate->add_option("--workers", ann.workers, "Worker threads")->capture_default_str();
  annotate->add_option("--parser-ner", ann.parser_ner,
                       "Use NER labels as parser features when ner runs")
      ->capture_default_str();
  add_common(annotate);

  TrainConfig tr;
  CLI::App* train = app.add_subcommand("train", "Train a model into the model directory");
  train->add_option("task", tr.task, "wseg, pos, ner, parse or all")->required();
  train->add_option("--fin", tr.fin, "Training corpus")->required();
  train->add_option("--format", tr.format, "wseg corpus format: auto, segmented or columns")
      ->capture_default_str();
  train->add_option("--epochs", tr.epochs, "Perceptron epochs")->capture_default_str();
  train->add_option("--max-rules", tr.max_rules, "Maximum segmentation rules")->capture_default_str();
  train->add_option("--window", tr.window, "Segmentation rule window radius")->capture_default_str();
  train->add_option("--conjunctions", tr.conjunctions, "NER feature conjunctions (0 disables)")
      ->capture_default_str();
  train->add_option("--gazetteer", tr.gazetteer, "NER gazetteer file");
  train->add_flag("--merge-names", tr.merge_names, "Merge PER syllable runs into words");
  train->add_flag("--predicted-pos", tr.predicted_pos, "Train NER on predicted POS tags");
  train->add_option("--dev-size", tr.dev_size, "Hold out this many NER sentences")
      ->capture_default_str();
  train->add_option("--ner-features", tr.ner_features, "Parser NER features: auto, on, off, both")
      ->capture_default_str();
  train->add_option("--non-projective", tr.non_projective, "skip or lift")->capture_default_str();
  add_common(train);

  EvalConfig ev;
  CLI::App* evaluate = app.add_subcommand("eval", "Score predictions against a gold corpus");
  evaluate->add_option("task", ev.task, "wseg, pos, ner or parse")->required();
  evaluate->add_option("--gold", ev.gold, "Gold corpus")->required();
  evaluate->add_option("--pred", ev.pred, "Predicted corpus (default: run the models)");
  evaluate->add_option("--format", ev.format, "text or kv")->capture_default_str();
  evaluate->add_flag("--gold-pos", ev.gold_pos, "Keep gold POS tags for ner/parse");
  evaluate->add_option("--parser-ner", ev.parser_ner, "Use the parser with NER features")
      ->capture_default_str();
  add_common(evaluate);

  BenchConfig bc;
  CLI::App* bench = app.add_subcommand("bench", "Measure words per second per pipeline stage");
  bench->add_option("--fin", bc.fin, "Input text file");
  bench->add_option("--annotators", bc.annotators, "Comma-separated annotators")
      ->capture_default_str();
  bench->add_option("--reps", bc.reps, "Repetitions (median reported)")->capture_default_str();
  bench->add_option("--workers", bc.workers, "Worker threads")->capture_default_str();
  bench->add_option("--synthetic-words", bc.synthetic_words, "Generate this many words instead of -fin");
  bench->add_option("--parser-ner", bc.parser_ner, "Use the parser with NER features")
      ->capture_default_str();
  add_common(bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (annotate->parsed()) return RunAnnotate(common, ann, out, err);
    if (train->parsed()) return RunTrain(common, tr, out);
    if (evaluate->parsed()) return RunEval(common, ev, out);
    if (bench->parsed()) return RunBench(common, bc, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitConfig;
}

}  // namespace sylpipe::cli
