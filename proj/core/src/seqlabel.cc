#include "sylpipe/seqlabel.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "sylpipe/binary_io.h"
#include "sylpipe/errors.h"
#include "sylpipe/text.h"

namespace sylpipe::seqlabel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kMagic = "SYLSEQ";
constexpr uint32_t kVersion = 1;

struct AttributeName {
  std::string_view name;
  Attribute attribute;
};

constexpr AttributeName kAttributeNames[] = {
    {"form", Attribute::kForm},         {"prefix", Attribute::kPrefix},
    {"suffix", Attribute::kSuffix},     {"cap", Attribute::kCapShape},
    {"digit", Attribute::kHasDigit},    {"hyphen", Attribute::kHasHyphen},
    {"first", Attribute::kFirst},       {"last", Attribute::kLast},
    {"pos", Attribute::kPosTag},        {"gaz", Attribute::kGazetteer},
};

TemplateAtom ParseAtom(std::string_view s, std::string_view descriptor) {
  auto fail = [&]() -> TemplateAtom {
    throw ConfigError("bad feature template '" + std::string(descriptor) + "'");
  };
  TemplateAtom atom;
  if (s == "bias") return atom;
  size_t at = s.find('@');
  if (at == std::string_view::npos) return fail();
  std::string_view head = s.substr(0, at);
  std::string_view offset = s.substr(at + 1);
  if (!offset.empty() && offset.front() == '+') offset.remove_prefix(1);
  auto [p, ec] = std::from_chars(offset.data(), offset.data() + offset.size(), atom.offset);
  if (ec != std::errc() || p != offset.data() + offset.size()) return fail();
  for (const AttributeName& a : kAttributeNames) {
    if (head.substr(0, a.name.size()) != a.name) continue;
    std::string_view rest = head.substr(a.name.size());
    atom.attribute = a.attribute;
    if (a.attribute == Attribute::kPrefix || a.attribute == Attribute::kSuffix) {
      auto [q, ec2] = std::from_chars(rest.data(), rest.data() + rest.size(), atom.length);
      if (ec2 != std::errc() || q != rest.data() + rest.size() || atom.length <= 0) return fail();
      return atom;
    }
    if (!rest.empty()) continue;
    return atom;
  }
  return fail();
}

std::string AtomName(const TemplateAtom& atom) {
  if (atom.attribute == Attribute::kBias) return "bias";
  std::string out;
  for (const AttributeName& a : kAttributeNames) {
    if (a.attribute == atom.attribute) out = std::string(a.name);
  }
  if (atom.attribute == Attribute::kPrefix || atom.attribute == Attribute::kSuffix) {
    out += std::to_string(atom.length);
  }
  out += '@';
  if (atom.offset > 0) out += '+';
  out += std::to_string(atom.offset);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

FeatureTemplate FeatureTemplate::Parse(std::string_view descriptor) {
  FeatureTemplate t;
  for (std::string_view piece : text::Split(descriptor, '|')) {
    t.atoms_.push_back(ParseAtom(piece, descriptor));
  }
  for (size_t i = 0; i < t.atoms_.size(); ++i) {
    if (i > 0) t.name_ += '|';
    t.name_ += AtomName(t.atoms_[i]);
  }
  return t;
}

bool FeatureTemplate::Uses(Attribute attribute) const {
  for (const TemplateAtom& a : atoms_) {
    if (a.attribute == attribute) return true;
  }
  return false;
}

std::vector<FeatureTemplate> ParseTemplates(std::span<const std::string_view> descriptors) {
  std::vector<FeatureTemplate> out;
  for (std::string_view d : descriptors) out.push_back(FeatureTemplate::Parse(d));
  return out;
}

FeatureExtractor::FeatureExtractor(std::vector<FeatureTemplate> templates,
                                   std::vector<std::string> gazetteer)
    : templates_(std::move(templates)), gazetteer_(std::move(gazetteer)) {
  std::sort(gazetteer_.begin(), gazetteer_.end());
  gazetteer_.erase(std::unique(gazetteer_.begin(), gazetteer_.end()), gazetteer_.end());
  for (const std::string& g : gazetteer_) gazetteer_set_.insert(g);
}

void FeatureExtractor::AppendValue(const Sentence& sentence, int position,
                                   const TemplateAtom& atom, std::string& out) const {
  const int n = static_cast<int>(sentence.size());
  const int p = position + atom.offset;
  if (atom.attribute == Attribute::kBias) {
    out += '1';
    return;
  }
  if (atom.attribute == Attribute::kFirst) {
    out += p == 0 ? '1' : '0';
    return;
  }
  if (atom.attribute == Attribute::kLast) {
    out += p == n - 1 ? '1' : '0';
    return;
  }
  if (p < 0) {
    out += "<s>";
    return;
  }
  if (p >= n) {
    out += "</s>";
    return;
  }
  const Token& token = sentence.tokens[p];
  switch (atom.attribute) {
    case Attribute::kForm: out += token.form; break;
    case Attribute::kPrefix: out += text::PrefixCodePoints(token.form, atom.length); break;
    case Attribute::kSuffix: out += text::SuffixCodePoints(token.form, atom.length); break;
    case Attribute::kCapShape: out += text::CapShapeName(text::ShapeOf(token.form)); break;
    case Attribute::kHasDigit: out += text::ContainsDigit(token.form) ? '1' : '0'; break;
    case Attribute::kHasHyphen: out += text::ContainsHyphen(token.form) ? '1' : '0'; break;
    case Attribute::kPosTag: out += token.pos_tag ? std::string_view(*token.pos_tag) : "_"; break;
    case Attribute::kGazetteer:
      out += gazetteer_set_.count(token.form) ? '1' : '0';
      break;
    default: break;
  }
}

void FeatureExtractor::Extract(const Sentence& sentence, int position,
                               std::vector<std::string>& out) const {
  out.resize(templates_.size());
  for (size_t t = 0; t < templates_.size(); ++t) {
    std::string& f = out[t];
    f.assign(templates_[t].name());
    f += '=';
    const auto& atoms = templates_[t].atoms();
    for (size_t a = 0; a < atoms.size(); ++a) {
      if (a > 0) f += '|';
      AppendValue(sentence, position, atoms[a], f);
    }
  }
}

// ---------------------------------------------------------------------------

ScoreLattice::ScoreLattice(int length, int num_labels)
    : length(length),
      num_labels(num_labels),
      emission(static_cast<size_t>(length) * num_labels, 0.0),
      transition(static_cast<size_t>(num_labels + 1) * num_labels, 0.0) {}

double ScoreLattice::SequenceScore(std::span<const int> labels) const {
  if (static_cast<int>(labels.size()) != length) return kNegInf;
  double score = 0.0;
  int prev = -1;
  for (int i = 0; i < length; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= num_labels || !IsLegal(i, y) || !IsAllowed(prev, y)) return kNegInf;
    score += Transition(prev, y);
    score += Emission(i, y);
    prev = y;
  }
  return score;
}

DecodeResult ViterbiDecode(const ScoreLattice& lattice) {
  const int n = lattice.length;
  const int L = lattice.num_labels;
  DecodeResult result;
  if (n == 0) return result;
  if (L == 0) throw DecodeError("empty label alphabet");
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int y = 0; y < L && !any; ++y) any = lattice.IsLegal(i, y);
    if (!any) throw DecodeError("position " + std::to_string(i) + " has no legal label");
  }

  // suffix[i][y]: best score of positions i..n-1 given label y at i,
  // excluding the transition into i. Decoding then walks forward, taking
  // the lowest label index among the maxima at every step, which yields the
  // lexicographically smallest optimal sequence.
  std::vector<double> suffix(static_cast<size_t>(n) * L, kNegInf);
  auto at = [&](int i, int y) -> double& { return suffix[static_cast<size_t>(i) * L + y]; };
  for (int y = 0; y < L; ++y) {
    if (lattice.IsLegal(n - 1, y)) at(n - 1, y) = lattice.Emission(n - 1, y);
  }
  for (int i = n - 2; i >= 0; --i) {
    for (int y = 0; y < L; ++y) {
      if (!lattice.IsLegal(i, y)) continue;
      double best = kNegInf;
      for (int z = 0; z < L; ++z) {
        if (!lattice.IsAllowed(y, z) || at(i + 1, z) == kNegInf) continue;
        best = std::max(best, lattice.Transition(y, z) + at(i + 1, z));
      }
      if (best != kNegInf) at(i, y) = lattice.Emission(i, y) + best;
    }
  }

  result.labels.resize(n);
  int prev = -1;
  for (int i = 0; i < n; ++i) {
    double best = kNegInf;
    int arg = -1;
    for (int y = 0; y < L; ++y) {
      if (!lattice.IsAllowed(prev, y) || at(i, y) == kNegInf) continue;
      const double s = lattice.Transition(prev, y) + at(i, y);
      if (s > best) {
        best = s;
        arg = y;
      }
    }
    if (arg < 0) throw DecodeError("no label sequence satisfies the constraints");
    result.labels[i] = arg;
    prev = arg;
  }
  result.score = lattice.SequenceScore(result.labels);
  return result;
}

DecodeResult BruteForceDecode(const ScoreLattice& lattice, int64_t max_sequences) {
  const int n = lattice.length;
  const int L = lattice.num_labels;
  DecodeResult result;
  if (n == 0) return result;
  if (L == 0) throw DecodeError("empty label alphabet");
  int64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > max_sequences / L) {
      throw DecodeError("instance too large for exhaustive decoding");
    }
    total *= L;
  }
  if (total > max_sequences) throw DecodeError("instance too large for exhaustive decoding");
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int y = 0; y < L && !any; ++y) any = lattice.IsLegal(i, y);
    if (!any) throw DecodeError("position " + std::to_string(i) + " has no legal label");
  }

  // Odometer enumeration in lexicographic order; a later sequence replaces
  // the incumbent only if strictly better.
  std::vector<int> seq(n, 0);
  double best = kNegInf;
  bool found = false;
  for (int64_t k = 0; k < total; ++k) {
    const double s = lattice.SequenceScore(seq);
    if (s != kNegInf && (!found || s > best)) {
      best = s;
      result.labels = seq;
      found = true;
    }
    for (int i = n - 1; i >= 0; --i) {
      if (++seq[i] < L) break;
      seq[i] = 0;
    }
  }
  if (!found) throw DecodeError("no label sequence satisfies the constraints");
  result.score = best;
  return result;
}

// ---------------------------------------------------------------------------

LinearModel::LinearModel(std::vector<std::string> labels, FeatureExtractor extractor)
    : labels_(std::move(labels)), extractor_(std::move(extractor)) {
  if (labels_.empty()) throw ConfigError("label alphabet is empty");
  std::vector<std::string> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("label alphabet has duplicates");
  }
  transition_.assign(static_cast<size_t>(labels_.size() + 1) * labels_.size(), 0.0);
}

int LinearModel::LabelIndex(std::string_view label) const {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void LinearModel::IndexConjunctions() {
  conjunctions_by_first_.clear();
  for (const Conjunction& c : conjunctions_) {
    conjunctions_by_first_[c.first].emplace_back(c.second, c.id);
  }
}

std::vector<std::vector<int>> LinearModel::FeatureIds(const Sentence& sentence) const {
  const int n = static_cast<int>(sentence.size());
  std::vector<std::vector<int>> ids(n);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    extractor_.Extract(sentence, i, names);
    std::vector<int>& row = ids[i];
    for (const std::string& name : names) {
      int id = alphabet_.Find(name);
      if (id >= 0) row.push_back(id);
    }
    std::sort(row.begin(), row.end());
    if (conjunctions_by_first_.empty()) continue;
    const size_t base = row.size();
    for (size_t k = 0; k < base; ++k) {
      auto it = conjunctions_by_first_.find(row[k]);
      if (it == conjunctions_by_first_.end()) continue;
      for (const auto& [second, id] : it->second) {
        if (std::binary_search(row.begin(), row.begin() + base, second)) row.push_back(id);
      }
    }
  }
  return ids;
}

ScoreLattice LinearModel::BuildLattice(const Sentence& sentence) const {
  const int n = static_cast<int>(sentence.size());
  const int L = num_labels();
  ScoreLattice lattice(n, L);
  lattice.transition = transition_;
  std::vector<std::vector<int>> ids = FeatureIds(sentence);
  for (int i = 0; i < n; ++i) {
    double* row = lattice.emission.data() + static_cast<size_t>(i) * L;
    for (int f : ids[i]) {
      const double* w = emission_.data() + static_cast<size_t>(f) * L;
      for (int y = 0; y < L; ++y) row[y] += w[y];
    }
  }
  return lattice;
}

DecodeResult LinearModel::Decode(const Sentence& sentence,
                                 const std::vector<uint8_t>& allowed) const {
  ScoreLattice lattice = BuildLattice(sentence);
  lattice.allowed = allowed;
  return ViterbiDecode(lattice);
}

void LinearModel::SetWeights(FeatureAlphabet alphabet, std::vector<double> emission,
                             std::vector<double> transition) {
  const size_t L = labels_.size();
  if (emission.size() != static_cast<size_t>(alphabet.size()) * L ||
      transition.size() != (L + 1) * L) {
    throw ConfigError("weight shapes do not match the alphabet and labels");
  }
  alphabet.Freeze();
  alphabet_ = std::move(alphabet);
  conjunctions_.clear();
  conjunctions_by_first_.clear();
  emission_ = std::move(emission);
  transition_ = std::move(transition);
}

void LinearModel::Save(std::ostream& out) const {
  BinaryWriter w(out);
  w.Magic(kMagic);
  w.U32(kVersion);
  w.U32(static_cast<uint32_t>(labels_.size()));
  for (const std::string& l : labels_) w.Str(l);
  w.U32(static_cast<uint32_t>(extractor_.templates().size()));
  for (const FeatureTemplate& t : extractor_.templates()) w.Str(t.name());
  w.U32(static_cast<uint32_t>(extractor_.gazetteer().size()));
  for (const std::string& g : extractor_.gazetteer()) w.Str(g);
  alphabet_.Write(w);
  w.U32(static_cast<uint32_t>(conjunctions_.size()));
  for (const Conjunction& c : conjunctions_) {
    w.U32(static_cast<uint32_t>(c.first));
    w.U32(static_cast<uint32_t>(c.second));
    w.U32(static_cast<uint32_t>(c.id));
  }
  const int L = num_labels();
  WriteSparseRows(w, emission_, alphabet_.size(), L);
  WriteSparseRows(w, transition_, L + 1, L);
}

LinearModel LinearModel::Load(std::istream& in) {
  BinaryReader r(in);
  r.ExpectMagic(kMagic);
  const uint32_t version = r.U32();
  if (version != kVersion) throw ModelError("unsupported sequence model version " + std::to_string(version));
  std::vector<std::string> labels(r.U32());
  for (std::string& l : labels) l = r.Str();
  std::vector<FeatureTemplate> templates;
  const uint32_t num_templates = r.U32();
  try {
    for (uint32_t i = 0; i < num_templates; ++i) templates.push_back(FeatureTemplate::Parse(r.Str()));
  } catch (const ConfigError& e) {
    throw ModelError(e.what());
  }
  std::vector<std::string> gazetteer(r.U32());
  for (std::string& g : gazetteer) g = r.Str();

  LinearModel model;
  try {
    model = LinearModel(std::move(labels), FeatureExtractor(std::move(templates), std::move(gazetteer)));
  } catch (const ConfigError& e) {
    throw ModelError(e.what());
  }
  model.alphabet_ = FeatureAlphabet::Read(r);
  const uint32_t num_conj = r.U32();
  for (uint32_t i = 0; i < num_conj; ++i) {
    Conjunction c;
    c.first = static_cast<int>(r.U32());
    c.second = static_cast<int>(r.U32());
    c.id = static_cast<int>(r.U32());
    const int nf = model.alphabet_.size();
    if (c.first >= nf || c.second >= nf || c.id >= nf) throw ModelError("corrupt conjunction");
    model.conjunctions_.push_back(c);
  }
  model.IndexConjunctions();
  const int L = model.num_labels();
  model.emission_ = ReadSparseRows(r, model.alphabet_.size(), L);
  model.transition_ = ReadSparseRows(r, L + 1, L);
  return model;
}

void LinearModel::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  Save(out);
  if (!out) throw IoError("error writing '" + path + "'");
}

LinearModel LinearModel::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model '" + path + "'");
  return Load(in);
}

// ---------------------------------------------------------------------------

PerceptronTrainer::PerceptronTrainer(std::vector<std::string> labels,
                                     FeatureExtractor extractor,
                                     std::vector<uint8_t> allowed_transitions)
    : proto_(std::move(labels), std::move(extractor)),
      allowed_(std::move(allowed_transitions)),
      emission_(proto_.num_labels()),
      transition_(proto_.num_labels()) {
  const int L = proto_.num_labels();
  if (!allowed_.empty() && allowed_.size() != static_cast<size_t>(L + 1) * L) {
    throw ConfigError("transition constraint matrix has the wrong shape");
  }
  transition_.Resize(L + 1);
}

void PerceptronTrainer::AddExample(const Sentence& sentence, std::vector<int> gold) {
  if (gold.size() != sentence.size()) throw TrainingError("label count differs from token count");
  for (int y : gold) {
    if (y < 0 || y >= proto_.num_labels()) throw TrainingError("gold label out of range");
  }
  Example ex;
  ex.gold = std::move(gold);
  std::vector<std::string> names;
  for (int i = 0; i < static_cast<int>(sentence.size()); ++i) {
    proto_.extractor_.Extract(sentence, i, names);
    std::vector<int> row;
    for (const std::string& name : names) {
      int id = proto_.alphabet_.FindOrAdd(name);
      if (id >= 0) row.push_back(id);
    }
    std::sort(row.begin(), row.end());
    ex.base.push_back(std::move(row));
  }
  ex.ids = ex.base;
  examples_.push_back(std::move(ex));
  emission_.Resize(proto_.alphabet_.size());
}

ScoreLattice PerceptronTrainer::Lattice(const Example& ex, const std::vector<double>& emission,
                                        const std::vector<double>& transition) const {
  const int n = static_cast<int>(ex.gold.size());
  const int L = proto_.num_labels();
  ScoreLattice lattice(n, L);
  std::copy(transition.begin(), transition.begin() + lattice.transition.size(),
            lattice.transition.begin());
  lattice.allowed = allowed_;
  for (int i = 0; i < n; ++i) {
    double* row = lattice.emission.data() + static_cast<size_t>(i) * L;
    for (int f : ex.ids[i]) {
      const double* w = emission.data() + static_cast<size_t>(f) * L;
      for (int y = 0; y < L; ++y) row[y] += w[y];
    }
  }
  return lattice;
}

double PerceptronTrainer::RunEpoch(const std::vector<int>& order) {
  int64_t correct = 0;
  int64_t total = 0;
  for (int idx : order) {
    const Example& ex = examples_[idx];
    const int n = static_cast<int>(ex.gold.size());
    if (n > 0) {
      ScoreLattice lattice = Lattice(ex, emission_.raw_weights(), transition_.raw_weights());
      std::vector<int> pred = ViterbiDecode(lattice).labels;
      int prev_gold = -1;
      int prev_pred = -1;
      for (int i = 0; i < n; ++i) {
        const int g = ex.gold[i];
        const int p = pred[i];
        total += 1;
        correct += g == p;
        if (g != p) {
          for (int f : ex.ids[i]) {
            emission_.Update(f, g, 1.0);
            emission_.Update(f, p, -1.0);
          }
        }
        if (g != p || prev_gold != prev_pred) {
          transition_.Update(prev_gold + 1, g, 1.0);
          transition_.Update(prev_pred + 1, p, -1.0);
        }
        prev_gold = g;
        prev_pred = p;
      }
    }
    emission_.Tick();
    transition_.Tick();
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double PerceptronTrainer::RunEpoch(std::mt19937_64& rng, bool shuffle) {
  std::vector<int> order(examples_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  if (shuffle) DeterministicShuffle(order, rng);
  return RunEpoch(order);
}

void PerceptronTrainer::InduceConjunctions(int k) {
  if (k <= 0) return;
  const std::vector<double> emission = emission_.Averaged();
  const std::vector<double> transition = transition_.Averaged();
  std::map<std::pair<int, int>, int64_t> counts;
  for (const Example& ex : examples_) {
    if (ex.gold.empty()) continue;
    std::vector<int> pred = ViterbiDecode(Lattice(ex, emission, transition)).labels;
    for (size_t i = 0; i < ex.gold.size(); ++i) {
      if (pred[i] == ex.gold[i]) continue;
      const std::vector<int>& f = ex.base[i];
      for (size_t a = 0; a < f.size(); ++a) {
        for (size_t b = a + 1; b < f.size(); ++b) ++counts[{f[a], f[b]}];
      }
    }
  }
  std::vector<std::pair<std::pair<int, int>, int64_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  if (static_cast<int>(ranked.size()) > k) ranked.resize(k);
  for (const auto& [pair, count] : ranked) {
    Conjunction c;
    c.first = pair.first;
    c.second = pair.second;
    c.id = proto_.alphabet_.FindOrAdd(proto_.alphabet_.name(pair.first) + "&&" +
                                     proto_.alphabet_.name(pair.second));
    proto_.conjunctions_.push_back(c);
  }
  proto_.IndexConjunctions();
  emission_.Resize(proto_.alphabet_.size());
  emission_.Reset();
  transition_.Reset();
  RefreshConjunctionIds();
}

void PerceptronTrainer::RefreshConjunctionIds() {
  for (Example& ex : examples_) {
    ex.ids = ex.base;
    for (std::vector<int>& row : ex.ids) {
      const size_t base = row.size();
      for (size_t k = 0; k < base; ++k) {
        auto it = proto_.conjunctions_by_first_.find(row[k]);
        if (it == proto_.conjunctions_by_first_.end()) continue;
        for (const auto& [second, id] : it->second) {
          if (std::binary_search(row.begin(), row.begin() + base, second)) row.push_back(id);
        }
      }
    }
  }
}

LinearModel PerceptronTrainer::MakeModel(std::vector<double> emission,
                                         std::vector<double> transition) const {
  LinearModel model = proto_;
  model.alphabet_.Freeze();
  emission.resize(static_cast<size_t>(model.alphabet_.size()) * model.num_labels(), 0.0);
  model.emission_ = std::move(emission);
  model.transition_ = std::move(transition);
  return model;
}

LinearModel PerceptronTrainer::AveragedModel() const {
  return MakeModel(emission_.Averaged(), transition_.Averaged());
}

LinearModel PerceptronTrainer::RawModel() const {
  return MakeModel(emission_.raw_weights(), transition_.raw_weights());
}

LinearModel TrainAveragedPerceptron(std::vector<std::string> labels, FeatureExtractor extractor,
                                    const std::vector<LabeledSentence>& corpus,
                                    const PerceptronOptions& options,
                                    std::vector<uint8_t> allowed_transitions) {
  if (corpus.empty()) throw TrainingError("empty training corpus");
  PerceptronTrainer trainer(std::move(labels), std::move(extractor), std::move(allowed_transitions));
  for (const LabeledSentence& ex : corpus) trainer.AddExample(*ex.sentence, ex.labels);

  std::mt19937_64 rng(options.shuffle_seed);
  if (options.conjunction_count > 0) {
    trainer.RunEpoch(rng, options.shuffle);
    trainer.InduceConjunctions(options.conjunction_count);
    rng.seed(options.shuffle_seed);
  }
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const double accuracy = trainer.RunEpoch(rng, options.shuffle);
    if (options.on_epoch) options.on_epoch(epoch, accuracy);
  }
  return trainer.AveragedModel();
}

}  // namespace sylpipe::seqlabel
