#ifndef SYLPIPE_EVAL_H_
#define SYLPIPE_EVAL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sylpipe/annotation.h"
#include "sylpipe/pipeline.h"

namespace sylpipe::eval {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int64_t correct = 0;
  int64_t predicted = 0;
  int64_t gold = 0;

  // P = correct/predicted and R = correct/gold (0 when the denominator is 0);
  // F1 = 2PR/(P+R), or 0 when P+R = 0.
  static PRF FromCounts(int64_t correct, int64_t predicted, int64_t gold);
};

// Word spans as character offsets into the concatenated syllable stream of
// the whole corpus. Sentence boundaries may differ between the two sides;
// the syllables may not. Throws AlignmentError otherwise.
PRF SegmentationF1(const std::vector<std::vector<std::string>>& gold,
                   const std::vector<std::vector<std::string>>& predicted);
PRF SegmentationF1(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);

// Fraction of equal labels. Throws AlignmentError on a length mismatch.
double TaggingAccuracy(std::span<const std::string> gold, std::span<const std::string> predicted);
// POS accuracy over token-aligned corpora.
double TaggingAccuracy(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);

struct ChunkScores {
  PRF micro;
  std::map<std::string, PRF> per_type;
};

// Exact type-and-boundary matching of BIO entities, per sentence. Throws
// ContractError on invalid BIO and AlignmentError on mismatched lengths.
ChunkScores ChunkF1(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& predicted);
ChunkScores ChunkF1(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);

struct AttachmentScores {
  double las = 0.0;
  double uas = 0.0;
  int64_t token_count = 0;
};

// Over every token, punctuation included. Tokens without a predicted head
// count as wrong. Throws AlignmentError if the corpora are not token-aligned.
AttachmentScores ScoreAttachment(const std::vector<Sentence>& gold,
                                 const std::vector<Sentence>& predicted);

// Throws ContractError on an empty input.
double Median(std::vector<double> values);

struct Throughput {
  double words_per_second = 0.0;  // median over runs
  std::vector<double> runs;       // words/sec of each run
  int64_t words = 0;              // tokens produced per run
};

// Annotates `text` `repetitions` times with an already-built pipeline and
// reports annotated word tokens per wall-clock second. Lines are independent
// documents; with workers > 1 they are spread over that many threads.
// Throws ContractError on empty text or repetitions < 1.
Throughput BenchmarkThroughput(const pipeline::Pipeline& pipeline, const std::string& text,
                               int repetitions = 3, int workers = 1);

// Annotates each line of `text` as a separate document, preserving order.
std::vector<Document> AnnotateLines(const pipeline::Pipeline& pipeline, const std::string& text,
                                    int workers = 1);

// Ordered key/value results rendered either as aligned text or as
// "key=value" lines.
class Report {
 public:
  void Add(std::string key, double value);
  void Add(std::string key, int64_t value);
  void Add(std::string key, std::string value);
  void AddPrf(const std::string& prefix, const PRF& prf);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string Text() const;
  std::string KeyValue() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace sylpipe::eval

#endif  // SYLPIPE_EVAL_H_
