#include "sylpipe/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <functional>

#include "sylpipe/errors.h"
#include "sylpipe/text.h"

namespace sylpipe::pipeline {
namespace {

constexpr std::string_view kNames[] = {"wseg", "pos", "ner", "parse"};

class SegmenterStage : public Annotator {
 public:
  explicit SegmenterStage(std::shared_ptr<const wseg::SegmenterModel> model)
      : model_(std::move(model)) {}
  AnnotatorKind kind() const override { return AnnotatorKind::kWseg; }
  void Annotate(Document& document) const override {
    if (!document.sentences.empty()) return;
    std::vector<wseg::SyllableSequence> chunks;
    try {
      chunks = wseg::SplitAndTokenize(document.raw_text);
    } catch (const std::exception& e) {
      throw AnnotationError("wseg", 0, e.what());
    }
    document.sentences.reserve(chunks.size());
    for (size_t i = 0; i < chunks.size(); ++i) {
      try {
        document.sentences.push_back(model_->Segment(chunks[i]));
      } catch (const std::exception& e) {
        throw AnnotationError("wseg", static_cast<int>(i), e.what());
      }
    }
  }

 private:
  std::shared_ptr<const wseg::SegmenterModel> model_;
};

// Runs a per-sentence function, wrapping failures with the stage name.
class SentenceStage : public Annotator {
 public:
  SentenceStage(AnnotatorKind kind, std::function<void(Sentence&)> fn)
      : kind_(kind), fn_(std::move(fn)) {}
  AnnotatorKind kind() const override { return kind_; }
  void Annotate(Document& document) const override {
    for (size_t i = 0; i < document.sentences.size(); ++i) {
      try {
        fn_(document.sentences[i]);
      } catch (const std::exception& e) {
        throw AnnotationError(std::string(Name(kind_)), static_cast<int>(i), e.what());
      }
    }
  }

 private:
  AnnotatorKind kind_;
  std::function<void(Sentence&)> fn_;
};

template <typename Model>
std::shared_ptr<const Model> LoadModel(AnnotatorKind kind, const std::string& path) {
  if (path.empty() || !std::filesystem::exists(path)) {
    throw ModelError(std::string(Name(kind)) + ": model file not found: " +
                     (path.empty() ? "(no path)" : path));
  }
  try {
    return std::make_shared<const Model>(Model::LoadFile(path));
  } catch (const std::exception& e) {
    throw ModelError(std::string(Name(kind)) + ": cannot load " + path + ": " + e.what());
  }
}

}  // namespace

std::string_view Name(AnnotatorKind kind) { return kNames[static_cast<int>(kind)]; }

AnnotatorKind ParseAnnotatorKind(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (kNames[i] == name) return static_cast<AnnotatorKind>(i);
  }
  throw ConfigError("unknown annotator '" + std::string(name) +
                    "' (expected wseg, pos, ner or parse)");
}

std::vector<AnnotatorKind> ParseAnnotatorList(std::string_view list) {
  std::vector<AnnotatorKind> kinds;
  for (std::string_view part : text::Split(list, ',')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (part.empty()) continue;
    kinds.push_back(ParseAnnotatorKind(part));
  }
  return kinds;
}

std::vector<AnnotatorKind> AllAnnotators() {
  return {AnnotatorKind::kWseg, AnnotatorKind::kPos, AnnotatorKind::kNer, AnnotatorKind::kParse};
}

std::vector<AnnotatorKind> PrerequisiteClosure(const std::vector<AnnotatorKind>& requested) {
  bool want[4] = {};
  for (AnnotatorKind k : requested) {
    want[static_cast<int>(k)] = true;
    if (k != AnnotatorKind::kWseg) want[0] = true;
    if (k == AnnotatorKind::kNer || k == AnnotatorKind::kParse) want[1] = true;
  }
  std::vector<AnnotatorKind> out;
  for (int i = 0; i < 4; ++i) {
    if (want[i]) out.push_back(static_cast<AnnotatorKind>(i));
  }
  return out;
}

ModelPaths ModelPaths::InDirectory(const std::string& directory) {
  const std::filesystem::path dir(directory);
  return {(dir / "wseg.model").string(), (dir / "pos.model").string(),
          (dir / "ner.model").string(), (dir / "parse.model").string(),
          (dir / "parse-noner.model").string()};
}

namespace {

std::vector<AnnotatorKind> ClosureWithNotes(const std::vector<AnnotatorKind>& requested,
                                            std::vector<std::string>* notes) {
  std::vector<AnnotatorKind> stages = PrerequisiteClosure(requested);
  if (notes) {
    for (AnnotatorKind k : stages) {
      if (std::find(requested.begin(), requested.end(), k) == requested.end()) {
        notes->push_back("added prerequisite annotator '" + std::string(Name(k)) + "'");
      }
    }
  }
  return stages;
}

}  // namespace

Pipeline Pipeline::Build(const std::vector<AnnotatorKind>& requested, const ModelPaths& paths,
                         bool use_ner_features_in_parser, std::vector<std::string>* notes) {
  std::vector<AnnotatorKind> stages = ClosureWithNotes(requested, nullptr);
  const auto has = [&](AnnotatorKind k) {
    return std::find(stages.begin(), stages.end(), k) != stages.end();
  };
  PipelineModels models;
  if (has(AnnotatorKind::kWseg)) {
    models.wseg = LoadModel<wseg::SegmenterModel>(AnnotatorKind::kWseg, paths.wseg);
  }
  if (has(AnnotatorKind::kPos)) models.pos = LoadModel<pos::PosTagger>(AnnotatorKind::kPos, paths.pos);
  if (has(AnnotatorKind::kNer)) models.ner = LoadModel<ner::NerTagger>(AnnotatorKind::kNer, paths.ner);
  if (has(AnnotatorKind::kParse)) {
    const bool with_ner = use_ner_features_in_parser && has(AnnotatorKind::kNer);
    models.parser = LoadModel<depparse::ParserModel>(AnnotatorKind::kParse,
                                                     with_ner ? paths.parse : paths.parse_noner);
  }
  return FromModels(requested, std::move(models), use_ner_features_in_parser, notes);
}

Pipeline Pipeline::FromModels(const std::vector<AnnotatorKind>& requested, PipelineModels models,
                              bool use_ner_features_in_parser, std::vector<std::string>* notes) {
  Pipeline p;
  p.stages_ = ClosureWithNotes(requested, notes);
  for (AnnotatorKind k : p.stages_) {
    const std::string missing = std::string(Name(k)) + ": no model supplied";
    switch (k) {
      case AnnotatorKind::kWseg:
        if (!models.wseg) throw ConfigError(missing);
        p.annotators_.push_back(std::make_shared<SegmenterStage>(models.wseg));
        break;
      case AnnotatorKind::kPos: {
        if (!models.pos) throw ConfigError(missing);
        auto m = models.pos;
        p.annotators_.push_back(
            std::make_shared<SentenceStage>(k, [m](Sentence& s) { m->Tag(s); }));
        break;
      }
      case AnnotatorKind::kNer: {
        if (!models.ner) throw ConfigError(missing);
        auto m = models.ner;
        p.annotators_.push_back(
            std::make_shared<SentenceStage>(k, [m](Sentence& s) { m->Tag(s); }));
        break;
      }
      case AnnotatorKind::kParse: {
        if (!models.parser) throw ConfigError(missing);
        const bool with_ner = use_ner_features_in_parser && p.Has(AnnotatorKind::kNer);
        if (models.parser->use_ner() != with_ner) {
          throw ConfigError(with_ner ? "parse: the pipeline expects a parser trained with NER features"
                                     : "parse: the parser needs NER features, which this pipeline "
                                       "does not provide");
        }
        p.parser_uses_ner_ = with_ner;
        auto m = models.parser;
        p.annotators_.push_back(
            std::make_shared<SentenceStage>(k, [m](Sentence& s) { m->Parse(s); }));
        break;
      }
    }
  }
  return p;
}

bool Pipeline::Has(AnnotatorKind kind) const {
  return std::find(stages_.begin(), stages_.end(), kind) != stages_.end();
}

void Pipeline::Annotate(Document& document) const {
  if (!Has(AnnotatorKind::kWseg) && document.sentences.empty() && !document.raw_text.empty()) {
    throw ConfigError("document has no sentences and the pipeline cannot segment");
  }
  for (const auto& a : annotators_) a->Annotate(document);
}

Document Pipeline::Annotate(std::string raw_text) const {
  Document doc(std::move(raw_text));
  Annotate(doc);
  return doc;
}

}  // namespace sylpipe::pipeline
