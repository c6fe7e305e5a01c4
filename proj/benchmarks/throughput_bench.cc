#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "sylpipe/depparse.h"
#include "sylpipe/ner.h"
#include "sylpipe/pipeline.h"
#include "sylpipe/pos.h"
#include "sylpipe/seqlabel.h"
#include "sylpipe/wseg.h"
#include "synthetic.h"

namespace sylpipe {
namespace {

using enum pipeline::AnnotatorKind;

const pipeline::PipelineModels& Models() {
  static const pipeline::PipelineModels models = [] {
    const std::vector<Sentence> treebank = synthetic::GenerateTreebank(1000, 11, true);
    std::vector<std::vector<std::string>> words;
    for (const Sentence& s : treebank) words.push_back(s.Forms());
    pipeline::PipelineModels m;
    m.wseg = std::make_shared<const wseg::SegmenterModel>(wseg::TrainSegmenter(words));
    m.pos = std::make_shared<const pos::PosTagger>(pos::TrainPosTagger(treebank));
    m.ner = std::make_shared<const ner::NerTagger>(ner::TrainNerTagger(treebank));
    depparse::ParserTrainingOptions opts;
    opts.use_ner = true;
    m.parser = std::make_shared<const depparse::ParserModel>(depparse::TrainParser(treebank, opts));
    return m;
  }();
  return models;
}

const std::string& Text() {
  static const std::string text = synthetic::GenerateRawText(10000, 12);
  return text;
}

void RunPipeline(benchmark::State& state, const std::vector<pipeline::AnnotatorKind>& kinds) {
  const pipeline::Pipeline p = pipeline::Pipeline::FromModels(kinds, Models());
  int64_t words = 0;
  for (auto _ : state) {
    Document doc = p.Annotate(Text());
    words += static_cast<int64_t>(doc.WordCount());
    benchmark::DoNotOptimize(doc);
  }
  state.counters["words/s"] = benchmark::Counter(static_cast<double>(words), benchmark::Counter::kIsRate);
}

void BM_Segment(benchmark::State& state) { RunPipeline(state, {kWseg}); }
BENCHMARK(BM_Segment)->Unit(benchmark::kMillisecond);

void BM_SegmentTag(benchmark::State& state) { RunPipeline(state, {kWseg, kPos}); }
BENCHMARK(BM_SegmentTag)->Unit(benchmark::kMillisecond);

void BM_SegmentTagNer(benchmark::State& state) { RunPipeline(state, {kWseg, kPos, kNer}); }
BENCHMARK(BM_SegmentTagNer)->Unit(benchmark::kMillisecond);

void BM_FullPipeline(benchmark::State& state) { RunPipeline(state, {kWseg, kPos, kNer, kParse}); }
BENCHMARK(BM_FullPipeline)->Unit(benchmark::kMillisecond);

void BM_Viterbi(benchmark::State& state) {
  const int length = static_cast<int>(state.range(0));
  seqlabel::ScoreLattice lattice(length, 9);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (double& v : lattice.emission) v = normal(rng);
  for (double& v : lattice.transition) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(seqlabel::ViterbiDecode(lattice));
  state.SetItemsProcessed(state.iterations() * length);
}
BENCHMARK(BM_Viterbi)->Arg(10)->Arg(40)->Arg(160);

void BM_SplitAndTokenize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(wseg::SplitAndTokenize(Text()));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(Text().size()));
}
BENCHMARK(BM_SplitAndTokenize)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sylpipe

BENCHMARK_MAIN();
