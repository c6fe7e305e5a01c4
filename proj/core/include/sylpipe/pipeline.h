#ifndef SYLPIPE_PIPELINE_H_
#define SYLPIPE_PIPELINE_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sylpipe/annotation.h"
#include "sylpipe/depparse.h"
#include "sylpipe/ner.h"
#include "sylpipe/pos.h"
#include "sylpipe/wseg.h"

namespace sylpipe::pipeline {

enum class AnnotatorKind { kWseg = 0, kPos = 1, kNer = 2, kParse = 3 };

std::string_view Name(AnnotatorKind kind);
// Throws ConfigError for anything but wseg, pos, ner, parse.
AnnotatorKind ParseAnnotatorKind(std::string_view name);
// Comma-separated list, e.g. "wseg,pos". Empty entries are ignored.
std::vector<AnnotatorKind> ParseAnnotatorList(std::string_view list);
std::vector<AnnotatorKind> AllAnnotators();

// The requested kinds plus their prerequisites, in pipeline order.
std::vector<AnnotatorKind> PrerequisiteClosure(const std::vector<AnnotatorKind>& requested);

// Model file locations. InDirectory uses wseg.model, pos.model, ner.model,
// parse.model (trained with NER features) and parse-noner.model.
struct ModelPaths {
  std::string wseg;
  std::string pos;
  std::string ner;
  std::string parse;
  std::string parse_noner;
  static ModelPaths InDirectory(const std::string& directory);
};

struct PipelineModels {
  std::shared_ptr<const wseg::SegmenterModel> wseg;
  std::shared_ptr<const pos::PosTagger> pos;
  std::shared_ptr<const ner::NerTagger> ner;
  std::shared_ptr<const depparse::ParserModel> parser;
};

// One pipeline stage. Implementations must be safe to call concurrently on
// distinct documents.
class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual AnnotatorKind kind() const = 0;
  virtual void Annotate(Document& document) const = 0;
};

class Pipeline {
 public:
  // Loads the models for the prerequisite closure of `requested`. The parser
  // model with NER features is chosen only when ner is part of the pipeline
  // and `use_ner_features_in_parser` is set. Auto-inserted prerequisites are
  // reported through `notes`. Throws ModelError naming the annotator whose
  // model failed to load.
  static Pipeline Build(const std::vector<AnnotatorKind>& requested, const ModelPaths& paths,
                        bool use_ner_features_in_parser = true,
                        std::vector<std::string>* notes = nullptr);

  // Same, from models already in memory. Throws ConfigError if a needed
  // model is missing, or if the parser's NER setting disagrees with the
  // pipeline.
  static Pipeline FromModels(const std::vector<AnnotatorKind>& requested, PipelineModels models,
                             bool use_ner_features_in_parser = true,
                             std::vector<std::string>* notes = nullptr);

  const std::vector<AnnotatorKind>& stages() const { return stages_; }
  bool Has(AnnotatorKind kind) const;
  bool parser_uses_ner() const { return parser_uses_ner_; }

  // Runs every stage in order. Segmentation is skipped when the document
  // already has sentences. Throws AnnotationError (stage and sentence index)
  // at the first failure.
  void Annotate(Document& document) const;
  Document Annotate(std::string raw_text) const;

 private:
  std::vector<AnnotatorKind> stages_;
  std::vector<std::shared_ptr<const Annotator>> annotators_;
  bool parser_uses_ner_ = false;
};

}  // namespace sylpipe::pipeline

#endif  // SYLPIPE_PIPELINE_H_
