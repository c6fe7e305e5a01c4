#include "sylpipe/depparse.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "sylpipe/binary_io.h"

namespace sylpipe::depparse {

TransitionSystem::TransitionSystem(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  root_label_ = LabelIndex(kRootLabel);
}

int TransitionSystem::LabelIndex(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  return it != labels_.end() && *it == label ? static_cast<int>(it - labels_.begin()) : -1;
}

int TransitionSystem::ClassOf(Transition t) const {
  switch (t.type) {
    case TransitionType::kShift: return 0;
    case TransitionType::kLeftArc: return 1 + t.label;
    case TransitionType::kRightArc: return 1 + num_labels() + t.label;
    case TransitionType::kReduce: return 1 + 2 * num_labels();
  }
  return -1;
}

Transition TransitionSystem::FromClass(int cls) const {
  const int L = num_labels();
  if (cls == 0) return Transition::Shift();
  if (cls <= L) return Transition::LeftArc(cls - 1);
  if (cls <= 2 * L) return Transition::RightArc(cls - 1 - L);
  return Transition::Reduce();
}

std::string TransitionSystem::Name(Transition t) const {
  switch (t.type) {
    case TransitionType::kShift: return "SHIFT";
    case TransitionType::kLeftArc: return "LEFT-ARC(" + labels_[t.label] + ")";
    case TransitionType::kRightArc: return "RIGHT-ARC(" + labels_[t.label] + ")";
    case TransitionType::kReduce: return "REDUCE";
  }
  return "?";
}

ParserState::ParserState(int sentence_length)
    : n_(sentence_length),
      stack_{0},
      heads_(n_ + 1, -1),
      labels_(n_ + 1, -1),
      leftmost_(n_ + 1, -1),
      rightmost_(n_ + 1, -1),
      left_count_(n_ + 1, 0),
      right_count_(n_ + 1, 0) {}

std::vector<int> ParserState::Buffer() const {
  std::vector<int> b;
  for (int i = front_; i <= n_; ++i) b.push_back(i);
  return b;
}

void ParserState::Shift() { stack_.push_back(front_++); }

void ParserState::AddArc(int head, int dependent, int label) {
  heads_[dependent] = head;
  labels_[dependent] = label;
  if (dependent < head) {
    if (leftmost_[head] < 0 || dependent < leftmost_[head]) leftmost_[head] = dependent;
    ++left_count_[head];
  } else {
    if (rightmost_[head] < 0 || dependent > rightmost_[head]) rightmost_[head] = dependent;
    ++right_count_[head];
  }
  arcs_.push_back({head, dependent, label});
}

std::vector<Transition> LegalTransitions(const ParserState& state, const TransitionSystem& system) {
  std::vector<Transition> out;
  const int top = state.StackAt(0);
  const bool buffer = !state.BufferEmpty();
  if (buffer) out.push_back(Transition::Shift());
  if (buffer && top > 0 && !state.HasHead(top)) {
    for (int l = 0; l < system.num_labels(); ++l) out.push_back(Transition::LeftArc(l));
  }
  if (buffer && top >= 0) {
    for (int l = 0; l < system.num_labels(); ++l) out.push_back(Transition::RightArc(l));
  }
  if (top > 0 && state.HasHead(top)) out.push_back(Transition::Reduce());
  return out;
}

namespace {

bool RootHasDependent(const ParserState& state) {
  return state.LeftValency(0) + state.RightValency(0) > 0;
}

// Legality under the decoding restrictions, by class id.
void DecodingMask(const ParserState& state, const TransitionSystem& system,
                  std::vector<uint8_t>& mask) {
  const int L = system.num_labels();
  const int root = system.root_label();
  mask.assign(system.num_classes(), 0);
  const int top = state.StackAt(0);
  const bool buffer = !state.BufferEmpty();
  if (buffer) mask[0] = 1;
  if (buffer && top > 0 && !state.HasHead(top)) {
    for (int l = 0; l < L; ++l) mask[1 + l] = l != root;
  }
  if (buffer && top > 0) {
    for (int l = 0; l < L; ++l) mask[1 + L + l] = l != root;
  } else if (buffer && top == 0 && root >= 0 && !RootHasDependent(state)) {
    mask[1 + L + root] = 1;
  }
  if (top > 0 && state.HasHead(top)) mask[1 + 2 * L] = 1;
}

}  // namespace

std::vector<Transition> DecodingTransitions(const ParserState& state,
                                            const TransitionSystem& system) {
  std::vector<uint8_t> mask;
  DecodingMask(state, system, mask);
  std::vector<Transition> out;
  for (int c = 0; c < system.num_classes(); ++c) {
    if (mask[c]) out.push_back(system.FromClass(c));
  }
  return out;
}

void ApplyTransition(ParserState& state, Transition t, const TransitionSystem& system) {
  std::vector<Transition> legal = LegalTransitions(state, system);
  if (std::find(legal.begin(), legal.end(), t) == legal.end()) {
    throw ContractError("illegal transition " +
                        (t.label >= system.num_labels() ? std::string("(bad label)")
                                                        : system.Name(t)));
  }
  const int top = state.StackAt(0);
  const int front = state.buffer_front();
  switch (t.type) {
    case TransitionType::kShift:
      state.Shift();
      break;
    case TransitionType::kLeftArc:
      state.AddArc(front, top, t.label);
      state.PopStack();
      break;
    case TransitionType::kRightArc:
      state.AddArc(top, front, t.label);
      state.Shift();
      break;
    case TransitionType::kReduce:
      state.PopStack();
      break;
  }
}

NonProjectiveError::NonProjectiveError(Arc a, Arc b)
    : Error("non-projective tree: arc " + std::to_string(a.head) + "->" +
            std::to_string(a.dependent) + " crosses arc " + std::to_string(b.head) + "->" +
            std::to_string(b.dependent)),
      first_(a),
      second_(b) {}

std::vector<int> GoldHeads(const Sentence& sentence) {
  std::vector<int> heads(sentence.size() + 1, -1);
  for (size_t i = 0; i < sentence.size(); ++i) {
    const Token& t = sentence.tokens[i];
    if (!t.head) throw Error("token " + std::to_string(i + 1) + " has no head");
    heads[i + 1] = *t.head;
  }
  return heads;
}

std::optional<std::pair<Arc, Arc>> FindCrossingArcs(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  for (int d1 = 1; d1 <= n; ++d1) {
    const int l1 = std::min(d1, heads[d1]), r1 = std::max(d1, heads[d1]);
    for (int d2 = d1 + 1; d2 <= n; ++d2) {
      const int l2 = std::min(d2, heads[d2]), r2 = std::max(d2, heads[d2]);
      if ((l1 < l2 && l2 < r1 && r1 < r2) || (l2 < l1 && l1 < r2 && r2 < r1)) {
        return std::make_pair(Arc{heads[d1], d1, -1}, Arc{heads[d2], d2, -1});
      }
    }
  }
  return std::nullopt;
}

bool IsProjective(const std::vector<int>& heads) { return !FindCrossingArcs(heads); }

namespace {

bool Dominates(const std::vector<int>& heads, int ancestor, int token) {
  const int n = static_cast<int>(heads.size()) - 1;
  for (int steps = 0; token > 0 && steps <= n; ++steps) {
    if (token == ancestor) return true;
    token = heads[token];
  }
  return token == ancestor;
}

bool ArcIsProjective(const std::vector<int>& heads, int dependent) {
  const int h = heads[dependent];
  for (int k = std::min(h, dependent) + 1; k < std::max(h, dependent); ++k) {
    if (!Dominates(heads, h, k)) return false;
  }
  return true;
}

}  // namespace

int Projectivize(Sentence& sentence) {
  std::vector<int> heads = GoldHeads(sentence);
  const int n = static_cast<int>(sentence.size());
  int lifts = 0;
  while (true) {
    int best = -1;
    for (int d = 1; d <= n; ++d) {
      if (heads[d] == 0 || ArcIsProjective(heads, d)) continue;
      if (best < 0 || std::abs(d - heads[d]) < std::abs(best - heads[best])) best = d;
    }
    if (best < 0) break;
    heads[best] = heads[heads[best]];
    ++lifts;
  }
  for (int d = 1; d <= n; ++d) sentence.tokens[d - 1].head = heads[d];
  return lifts;
}

std::vector<Transition> StaticOracle(const Sentence& sentence, const TransitionSystem& system) {
  const int n = static_cast<int>(sentence.size());
  const std::vector<int> heads = GoldHeads(sentence);
  for (int d = 1; d <= n; ++d) {
    if (heads[d] < 0 || heads[d] > n || heads[d] == d) {
      throw Error("token " + std::to_string(d) + " has an invalid head");
    }
  }
  if (auto crossing = FindCrossingArcs(heads)) {
    throw NonProjectiveError(crossing->first, crossing->second);
  }
  std::vector<int> labels(n + 1, -1);
  for (int d = 1; d <= n; ++d) {
    const Token& t = sentence.tokens[d - 1];
    if (!t.dep_label) throw Error("token " + std::to_string(d) + " has no relation label");
    labels[d] = system.LabelIndex(*t.dep_label);
    if (labels[d] < 0) throw Error("relation '" + *t.dep_label + "' is not in the alphabet");
  }

  std::vector<Transition> seq;
  ParserState state(n);
  // Guard against cycles in the gold heads.
  const size_t limit = 2 * static_cast<size_t>(n) + 2;
  while (seq.size() <= limit) {
    const int s = state.StackAt(0);
    Transition t;
    if (state.BufferEmpty()) {
      if (s <= 0) break;
      if (!state.HasHead(s)) throw Error("gold heads do not form a tree");
      t = Transition::Reduce();
    } else {
      const int b = state.buffer_front();
      if (s > 0 && heads[s] == b) {
        t = Transition::LeftArc(labels[s]);
      } else if (heads[b] == s) {
        t = Transition::RightArc(labels[b]);
      } else {
        bool needed = false;
        if (s > 0 && state.HasHead(s)) {
          for (int k : state.stack()) {
            if (k != s && (heads[k] == b || heads[b] == k)) needed = true;
          }
        }
        t = needed ? Transition::Reduce() : Transition::Shift();
      }
    }
    ApplyTransition(state, t, system);
    seq.push_back(t);
  }
  if (seq.size() > limit) throw Error("gold heads do not form a tree");
  return seq;
}

namespace {

constexpr std::string_view kNone = "<none>";
constexpr std::string_view kRootWord = "<root>";

std::string_view Form(const Sentence& s, int t) {
  if (t < 0) return kNone;
  if (t == 0) return kRootWord;
  return s.tokens[t - 1].form;
}

std::string_view Pos(const Sentence& s, int t) {
  if (t < 0) return kNone;
  if (t == 0) return kRootWord;
  const auto& p = s.tokens[t - 1].pos_tag;
  return p ? std::string_view(*p) : std::string_view("_");
}

std::string_view Ner(const Sentence& s, int t) {
  if (t < 0) return kNone;
  if (t == 0) return kRootWord;
  return s.tokens[t - 1].ner_or_outside();
}

std::string_view DistanceBucket(int s0, int b0) {
  if (s0 < 0 || b0 < 0) return kNone;
  const int d = b0 - s0;
  static constexpr std::string_view kSmall[] = {"0", "1", "2", "3", "4"};
  if (d < 5) return kSmall[d];
  return d < 10 ? "5-9" : "10+";
}

std::string_view Count(int c) {
  static constexpr std::string_view kCounts[] = {"0", "1", "2", "3+"};
  return kCounts[std::min(c, 3)];
}

// Reuses the strings already held by `out` to avoid reallocating.
class FeatureWriter {
 public:
  explicit FeatureWriter(std::vector<std::string>& out) : out_(out) {}
  ~FeatureWriter() { out_.resize(used_); }

  template <typename... Parts>
  void Add(std::string_view name, Parts... parts) {
    if (used_ == out_.size()) out_.emplace_back();
    std::string& f = out_[used_++];
    f.assign(name);
    f += '=';
    bool first = true;
    ((f += (first ? "" : "|"), f += parts, first = false), ...);
  }

 private:
  std::vector<std::string>& out_;
  size_t used_ = 0;
};

}  // namespace

const std::vector<std::string>& NerTemplateNames() {
  static const std::vector<std::string> names = {"S0n", "B0n", "B1n", "S0n|B0n", "S0p|S0n|B0n"};
  return names;
}

std::string_view TemplateOf(std::string_view feature) {
  return feature.substr(0, feature.find('='));
}

void ExtractFeatures(const Sentence& sentence, const ParserState& state, bool use_ner,
                     std::vector<std::string>& out) {
  const int s0 = state.StackAt(0), s1 = state.StackAt(1), s2 = state.StackAt(2);
  const int b0 = state.BufferAt(0), b1 = state.BufferAt(1), b2 = state.BufferAt(2);
  const int s0l = s0 >= 0 ? state.LeftmostChild(s0) : -1;
  const int s0r = s0 >= 0 ? state.RightmostChild(s0) : -1;
  const int b0l = b0 >= 0 ? state.LeftmostChild(b0) : -1;

  const std::string_view s0w = Form(sentence, s0), s0p = Pos(sentence, s0);
  const std::string_view b0w = Form(sentence, b0), b0p = Pos(sentence, b0);
  const std::string_view b1p = Pos(sentence, b1), s1p = Pos(sentence, s1);
  const std::string_view s0lp = Pos(sentence, s0l), s0rp = Pos(sentence, s0r);
  const std::string_view b0lp = Pos(sentence, b0l);
  const std::string_view dist = DistanceBucket(s0, b0);
  const int s0_label = s0 > 0 ? state.label(s0) : -1;
  const std::string s0d = s0 <= 0 ? std::string(kNone) : std::to_string(s0_label);

  FeatureWriter w(out);
  w.Add("bias");
  w.Add("S0w", s0w);
  w.Add("S0p", s0p);
  w.Add("S0wp", s0w, s0p);
  w.Add("S1w", Form(sentence, s1));
  w.Add("S1p", s1p);
  w.Add("S2w", Form(sentence, s2));
  w.Add("S2p", Pos(sentence, s2));
  w.Add("B0w", b0w);
  w.Add("B0p", b0p);
  w.Add("B0wp", b0w, b0p);
  w.Add("B1w", Form(sentence, b1));
  w.Add("B1p", b1p);
  w.Add("B2w", Form(sentence, b2));
  w.Add("B2p", Pos(sentence, b2));
  w.Add("S0lp", s0lp);
  w.Add("S0rp", s0rp);
  w.Add("B0lp", b0lp);
  w.Add("d", dist);
  w.Add("S0vl", Count(s0 >= 0 ? state.LeftValency(s0) : 0));
  w.Add("S0vr", Count(s0 >= 0 ? state.RightValency(s0) : 0));
  w.Add("B0vl", Count(b0 >= 0 ? state.LeftValency(b0) : 0));
  w.Add("S0l", std::string_view(s0d));
  w.Add("S0w|B0w", s0w, b0w);
  w.Add("S0wp|B0wp", s0w, s0p, b0w, b0p);
  w.Add("S0w|B0p", s0w, b0p);
  w.Add("S0p|B0w", s0p, b0w);
  w.Add("S0p|B0p", s0p, b0p);
  w.Add("S0p|B0p|B1p", s0p, b0p, b1p);
  w.Add("S1p|S0p|B0p", s1p, s0p, b0p);
  w.Add("S0p|B0p|d", s0p, b0p, dist);
  w.Add("S0w|B0w|d", s0w, b0w, dist);
  w.Add("S0p|S0lp|B0p", s0p, s0lp, b0p);
  w.Add("S0p|S0rp|B0p", s0p, s0rp, b0p);
  w.Add("S0p|B0p|B0lp", s0p, b0p, b0lp);
  if (use_ner) {
    const std::string_view s0n = Ner(sentence, s0), b0n = Ner(sentence, b0);
    w.Add("S0n", s0n);
    w.Add("B0n", b0n);
    w.Add("B1n", Ner(sentence, b1));
    w.Add("S0n|B0n", s0n, b0n);
    w.Add("S0p|S0n|B0n", s0p, s0n, b0n);
  }
}

ParserModel::ParserModel(TransitionSystem system, FeatureAlphabet alphabet,
                         std::vector<double> weights, bool use_ner)
    : system_(std::move(system)),
      alphabet_(std::move(alphabet)),
      weights_(std::move(weights)),
      use_ner_(use_ner) {
  alphabet_.Freeze();
  if (weights_.size() != static_cast<size_t>(alphabet_.size()) * system_.num_classes()) {
    throw ModelError("parser weight matrix does not match its alphabet");
  }
}

int ParserModel::Predict(const Sentence& sentence, const ParserState& state,
                         std::vector<std::string>& scratch) const {
  thread_local std::vector<uint8_t> mask;
  thread_local std::vector<double> scores;
  DecodingMask(state, system_, mask);
  const int C = system_.num_classes();
  scores.assign(C, 0.0);
  ExtractFeatures(sentence, state, use_ner_, scratch);
  for (const std::string& f : scratch) {
    const int id = alphabet_.Find(f);
    if (id < 0) continue;
    const double* row = &weights_[static_cast<size_t>(id) * C];
    for (int c = 0; c < C; ++c) scores[c] += row[c];
  }
  int best = -1;
  for (int c = 0; c < C; ++c) {
    if (mask[c] && (best < 0 || scores[c] > scores[best])) best = c;
  }
  return best;
}

void AttachLeftovers(Sentence& sentence, const ParserState& state, const TransitionSystem& system) {
  const int n = static_cast<int>(sentence.size());
  int root_child = -1;
  for (int d = 1; d <= n; ++d) {
    if (state.head(d) == 0) root_child = d;
  }
  for (int d = 1; d <= n; ++d) {
    Token& t = sentence.tokens[d - 1];
    if (state.HasHead(d)) {
      t.head = state.head(d);
      t.dep_label = system.labels()[state.label(d)];
    } else if (root_child < 0) {
      root_child = d;
      t.head = 0;
      t.dep_label = std::string(kRootLabel);
    } else {
      t.head = root_child;
      t.dep_label = std::string(kFallbackLabel);
    }
  }
}

void ParserModel::Parse(Sentence& sentence) const {
  if (sentence.empty()) return;
  ParserState state(static_cast<int>(sentence.size()));
  std::vector<std::string> scratch;
  while (true) {
    const int cls = Predict(sentence, state, scratch);
    if (cls < 0) break;
    ApplyTransition(state, system_.FromClass(cls), system_);
  }
  AttachLeftovers(sentence, state, system_);
}

namespace {
constexpr std::string_view kMagic = "SYLDEP";
constexpr uint32_t kVersion = 1;
}  // namespace

void ParserModel::Save(std::ostream& out) const {
  BinaryWriter w(out);
  w.Magic(kMagic);
  w.U32(kVersion);
  w.U8(use_ner_ ? 1 : 0);
  w.U32(system_.num_labels());
  for (const std::string& l : system_.labels()) w.Str(l);
  alphabet_.Write(w);
  WriteSparseRows(w, weights_, alphabet_.size(), system_.num_classes());
}

ParserModel ParserModel::Load(std::istream& in) {
  BinaryReader r(in);
  r.ExpectMagic(kMagic);
  if (r.U32() != kVersion) throw ModelError("unsupported parser model version");
  const bool use_ner = r.U8() != 0;
  const uint32_t num_labels = r.U32();
  std::vector<std::string> labels;
  for (uint32_t i = 0; i < num_labels; ++i) labels.push_back(r.Str());
  TransitionSystem system(labels);
  if (system.num_labels() != static_cast<int>(num_labels)) {
    throw ModelError("parser model has duplicate relation labels");
  }
  FeatureAlphabet alphabet = FeatureAlphabet::Read(r);
  std::vector<double> weights = ReadSparseRows(r, alphabet.size(), system.num_classes());
  return ParserModel(std::move(system), std::move(alphabet), std::move(weights), use_ner);
}

void ParserModel::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  Save(out);
  if (!out) throw IoError("failed writing " + path);
}

ParserModel ParserModel::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open parser model " + path);
  return Load(in);
}

namespace {

struct TrainingState {
  std::vector<int> features;
  int gold = 0;
  std::vector<uint8_t> mask;
};

}  // namespace

ParserModel TrainParser(const std::vector<Sentence>& treebank, const ParserTrainingOptions& options,
                        ParserTrainingStats* stats_out) {
  if (treebank.empty()) throw TrainingError("empty treebank");
  ParserTrainingStats stats;

  std::vector<std::string> label_set = {std::string(kRootLabel)};
  for (size_t i = 0; i < treebank.size(); ++i) {
    for (const Token& t : treebank[i].tokens) {
      if (!t.head || !t.dep_label) {
        throw TrainingError("sentence " + std::to_string(i + 1) + " lacks heads or relations");
      }
      if (options.use_ner && !t.ner_label) {
        throw TrainingError("sentence " + std::to_string(i + 1) +
                            " lacks NER labels, which NER features need");
      }
      label_set.push_back(*t.dep_label);
    }
  }
  TransitionSystem system(std::move(label_set));

  FeatureAlphabet alphabet;
  std::vector<std::vector<TrainingState>> examples;
  std::vector<std::string> scratch;
  for (const Sentence& original : treebank) {
    if (original.empty()) continue;
    Sentence s = original;
    if (!IsWellFormedTree(s)) {
      ++stats.skipped_malformed;
      continue;
    }
    if (!IsProjective(GoldHeads(s))) {
      if (options.non_projective == NonProjectivePolicy::kSkip) {
        ++stats.skipped_non_projective;
        continue;
      }
      stats.lifted_arcs += Projectivize(s);
    }
    std::vector<Transition> oracle = StaticOracle(s, system);
    ParserState state(static_cast<int>(s.size()));
    std::vector<TrainingState> seq;
    bool decodable = true;
    for (Transition t : oracle) {
      TrainingState ts;
      DecodingMask(state, system, ts.mask);
      ts.gold = system.ClassOf(t);
      if (!ts.mask[ts.gold]) {
        decodable = false;
        break;
      }
      ExtractFeatures(s, state, options.use_ner, scratch);
      for (const std::string& f : scratch) ts.features.push_back(alphabet.FindOrAdd(f));
      ApplyTransition(state, t, system);
      seq.push_back(std::move(ts));
    }
    if (!decodable) {
      ++stats.skipped_malformed;
      continue;
    }
    examples.push_back(std::move(seq));
    ++stats.sentences_used;
  }
  if (examples.empty()) throw TrainingError("no usable sentences in the treebank");

  const int C = system.num_classes();
  AveragedWeights weights(C);
  weights.Resize(alphabet.size());
  std::vector<int> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::mt19937_64 rng(options.seed);
  std::vector<double> scores(C);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    DeterministicShuffle(order, rng);
    int64_t correct = 0, total = 0;
    for (int idx : order) {
      for (const TrainingState& ts : examples[idx]) {
        std::fill(scores.begin(), scores.end(), 0.0);
        for (int f : ts.features) {
          for (int c = 0; c < C; ++c) scores[c] += weights.raw(f, c);
        }
        int best = -1;
        for (int c = 0; c < C; ++c) {
          if (ts.mask[c] && (best < 0 || scores[c] > scores[best])) best = c;
        }
        if (best == ts.gold) {
          ++correct;
        } else {
          for (int f : ts.features) {
            weights.Update(f, ts.gold, 1.0);
            weights.Update(f, best, -1.0);
          }
        }
        ++total;
        weights.Tick();
      }
    }
    if (options.on_epoch) options.on_epoch(epoch, total ? static_cast<double>(correct) / total : 1.0);
  }
  if (stats_out) *stats_out = stats;
  return ParserModel(std::move(system), std::move(alphabet), weights.Averaged(), options.use_ner);
}

}  // namespace sylpipe::depparse
