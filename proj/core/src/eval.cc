#include "sylpipe/eval.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <thread>

#include "sylpipe/errors.h"
#include "sylpipe/ner.h"
#include "sylpipe/text.h"

namespace sylpipe::eval {

PRF PRF::FromCounts(int64_t correct, int64_t predicted, int64_t gold) {
  PRF r;
  r.correct = correct;
  r.predicted = predicted;
  r.gold = gold;
  r.precision = predicted > 0 ? static_cast<double>(correct) / predicted : 0.0;
  r.recall = gold > 0 ? static_cast<double>(correct) / gold : 0.0;
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0 ? 2 * r.precision * r.recall / sum : 0.0;
  return r;
}

namespace {

struct SpanStream {
  std::string syllables;  // concatenated, each followed by '\x1f'
  std::vector<std::pair<size_t, size_t>> spans;
};

SpanStream Spans(const std::vector<std::vector<std::string>>& corpus) {
  SpanStream s;
  for (const auto& sentence : corpus) {
    for (const std::string& word : sentence) {
      const size_t start = s.syllables.size();
      for (const std::string& syl : SyllablesOf(word)) {
        s.syllables += syl;
        s.syllables += '\x1f';
      }
      s.spans.emplace_back(start, s.syllables.size());
    }
  }
  return s;
}

std::vector<std::vector<std::string>> FormsOf(const std::vector<Sentence>& corpus) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.size());
  for (const Sentence& s : corpus) out.push_back(s.Forms());
  return out;
}

void CheckSameSentenceCount(size_t gold, size_t predicted) {
  if (gold != predicted) {
    throw AlignmentError("gold has " + std::to_string(gold) + " sentences, predicted has " +
                         std::to_string(predicted));
  }
}

void CheckSameLength(size_t index, size_t gold, size_t predicted) {
  if (gold != predicted) {
    throw AlignmentError("sentence " + std::to_string(index + 1) + ": gold has " +
                         std::to_string(gold) + " tokens, predicted has " +
                         std::to_string(predicted));
  }
}

}  // namespace

PRF SegmentationF1(const std::vector<std::vector<std::string>>& gold,
                   const std::vector<std::vector<std::string>>& predicted) {
  const SpanStream g = Spans(gold);
  const SpanStream p = Spans(predicted);
  if (g.syllables != p.syllables) {
    throw AlignmentError("gold and predicted segmentations cover different syllables");
  }
  // Both span lists are sorted and non-overlapping.
  int64_t correct = 0;
  size_t i = 0, j = 0;
  while (i < g.spans.size() && j < p.spans.size()) {
    if (g.spans[i] == p.spans[j]) {
      ++correct;
      ++i;
      ++j;
    } else if (g.spans[i].first < p.spans[j].first ||
               (g.spans[i].first == p.spans[j].first && g.spans[i].second < p.spans[j].second)) {
      ++i;
    } else {
      ++j;
    }
  }
  return PRF::FromCounts(correct, static_cast<int64_t>(p.spans.size()),
                         static_cast<int64_t>(g.spans.size()));
}

PRF SegmentationF1(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  return SegmentationF1(FormsOf(gold), FormsOf(predicted));
}

double TaggingAccuracy(std::span<const std::string> gold, std::span<const std::string> predicted) {
  if (gold.size() != predicted.size()) {
    throw AlignmentError("label sequences differ in length (" + std::to_string(gold.size()) +
                         " vs " + std::to_string(predicted.size()) + ")");
  }
  if (gold.empty()) return 0.0;
  size_t match = 0;
  for (size_t i = 0; i < gold.size(); ++i) match += gold[i] == predicted[i];
  return static_cast<double>(match) / gold.size();
}

double TaggingAccuracy(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  CheckSameSentenceCount(gold.size(), predicted.size());
  std::vector<std::string> g, p;
  for (size_t i = 0; i < gold.size(); ++i) {
    CheckSameLength(i, gold[i].size(), predicted[i].size());
    for (size_t k = 0; k < gold[i].size(); ++k) {
      g.push_back(gold[i].tokens[k].pos_tag.value_or("_"));
      p.push_back(predicted[i].tokens[k].pos_tag.value_or("_"));
    }
  }
  return TaggingAccuracy(g, p);
}

ChunkScores ChunkF1(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& predicted) {
  CheckSameSentenceCount(gold.size(), predicted.size());
  struct Counts {
    int64_t correct = 0, predicted = 0, gold = 0;
  };
  std::map<std::string, Counts> by_type;
  for (size_t i = 0; i < gold.size(); ++i) {
    CheckSameLength(i, gold[i].size(), predicted[i].size());
    std::vector<ner::EntitySpan> g = ner::ExtractEntities(gold[i]);
    std::vector<ner::EntitySpan> p = ner::ExtractEntities(predicted[i]);
    for (const auto& e : g) ++by_type[e.type].gold;
    for (const auto& e : p) {
      ++by_type[e.type].predicted;
      if (std::find(g.begin(), g.end(), e) != g.end()) ++by_type[e.type].correct;
    }
  }
  ChunkScores scores;
  Counts total;
  for (const auto& [type, c] : by_type) {
    scores.per_type[type] = PRF::FromCounts(c.correct, c.predicted, c.gold);
    total.correct += c.correct;
    total.predicted += c.predicted;
    total.gold += c.gold;
  }
  scores.micro = PRF::FromCounts(total.correct, total.predicted, total.gold);
  return scores;
}

ChunkScores ChunkF1(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  std::vector<std::vector<std::string>> g, p;
  for (const Sentence& s : gold) g.push_back(ner::NerLabels(s));
  for (const Sentence& s : predicted) p.push_back(ner::NerLabels(s));
  return ChunkF1(g, p);
}

AttachmentScores ScoreAttachment(const std::vector<Sentence>& gold,
                                 const std::vector<Sentence>& predicted) {
  CheckSameSentenceCount(gold.size(), predicted.size());
  int64_t total = 0, heads = 0, labeled = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    CheckSameLength(i, gold[i].size(), predicted[i].size());
    for (size_t k = 0; k < gold[i].size(); ++k) {
      const Token& g = gold[i].tokens[k];
      const Token& p = predicted[i].tokens[k];
      if (g.form != p.form) {
        throw AlignmentError("sentence " + std::to_string(i + 1) + ", token " +
                             std::to_string(k + 1) + ": '" + g.form + "' vs '" + p.form + "'");
      }
      ++total;
      if (g.head && p.head && *g.head == *p.head) {
        ++heads;
        if (g.dep_label == p.dep_label) ++labeled;
      }
    }
  }
  AttachmentScores s;
  s.token_count = total;
  if (total > 0) {
    s.uas = static_cast<double>(heads) / total;
    s.las = static_cast<double>(labeled) / total;
  }
  return s;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of an empty set");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

std::vector<Document> AnnotateLines(const pipeline::Pipeline& pipeline, const std::string& text,
                                    int workers) {
  std::vector<Document> docs;
  for (std::string_view line : text::Split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    docs.emplace_back(std::string(line));
  }
  if (!docs.empty() && docs.back().raw_text.empty()) docs.pop_back();
  workers = std::max(1, std::min<int>(workers, static_cast<int>(docs.size())));
  if (workers == 1) {
    for (Document& d : docs) pipeline.Annotate(d);
    return docs;
  }
  // Contiguous blocks per worker; the first failure (in document order) wins.
  std::vector<std::exception_ptr> errors(workers);
  std::vector<size_t> failed_at(workers, docs.size());
  std::vector<std::thread> threads;
  const size_t block = (docs.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const size_t begin = w * block, end = std::min(docs.size(), begin + block);
      for (size_t i = begin; i < end; ++i) {
        try {
          pipeline.Annotate(docs[i]);
        } catch (...) {
          errors[w] = std::current_exception();
          failed_at[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int w = 0; w < workers; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
  }
  return docs;
}

Throughput BenchmarkThroughput(const pipeline::Pipeline& pipeline, const std::string& text,
                               int repetitions, int workers) {
  if (repetitions < 1) throw ContractError("repetitions must be at least 1");
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ContractError("cannot benchmark an empty document");
  }
  Throughput result;
  for (int r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Document> docs = AnnotateLines(pipeline, text, workers);
    const auto stop = std::chrono::steady_clock::now();
    int64_t words = 0;
    for (const Document& d : docs) words += static_cast<int64_t>(d.WordCount());
    const double seconds = std::chrono::duration<double>(stop - start).count();
    result.words = words;
    result.runs.push_back(seconds > 0 ? words / seconds : 0.0);
  }
  result.words_per_second = Median(result.runs);
  return result;
}

namespace {
std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace

void Report::Add(std::string key, double value) { entries_.emplace_back(std::move(key), FormatDouble(value)); }
void Report::Add(std::string key, int64_t value) {
  entries_.emplace_back(std::move(key), std::to_string(value));
}
void Report::Add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

void Report::AddPrf(const std::string& prefix, const PRF& prf) {
  Add(prefix + ".precision", prf.precision);
  Add(prefix + ".recall", prf.recall);
  Add(prefix + ".f1", prf.f1);
  Add(prefix + ".correct", prf.correct);
  Add(prefix + ".predicted", prf.predicted);
  Add(prefix + ".gold", prf.gold);
}

std::string Report::Text() const {
  size_t width = 0;
  for (const auto& [k, v] : entries_) width = std::max(width, k.size());
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out.append(width - k.size() + 2, ' ');
    out += v;
    out += '\n';
  }
  return out;
}

std::string Report::KeyValue() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace sylpipe::eval
