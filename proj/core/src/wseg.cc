#include "sylpipe/wseg.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "sylpipe/errors.h"
#include "sylpipe/text.h"

namespace sylpipe::wseg {
namespace {

constexpr int kOutOfRange = 2;
constexpr int kCapOutOfRange = 7;
constexpr std::string_view kFormatTag = "sylpipe-wseg";
constexpr int kFormatVersion = 1;
constexpr std::string_view kBosName = "<s>";
constexpr std::string_view kEosName = "</s>";

// ---------------------------------------------------------------------------
// Tokenization

struct RawSyllable {
  std::string text;
  bool space_before = false;
};

bool IsInternalConnector(char32_t c) {
  return c == U'.' || c == U',' || c == U'-' || c == U'\'' || c == U'’' || c == U'/';
}

void TokenizeChunk(std::string_view chunk, bool space_before,
                   std::vector<RawSyllable>& out) {
  std::vector<char32_t> cps;
  std::vector<size_t> starts;
  for (size_t pos = 0; pos < chunk.size();) {
    starts.push_back(pos);
    cps.push_back(text::NextCodePoint(chunk, pos));
  }
  starts.push_back(chunk.size());
  const size_t n = cps.size();
  size_t i = 0;
  bool first = true;
  auto emit = [&](size_t from, size_t to) {
    out.push_back({std::string(chunk.substr(starts[from], starts[to] - starts[from])),
                   first && space_before});
    first = false;
  };
  while (i < n) {
    if (text::IsAlnumOrMark(cps[i])) {
      size_t j = i + 1;
      while (j < n) {
        if (text::IsAlnumOrMark(cps[j])) {
          ++j;
        } else if (IsInternalConnector(cps[j]) && j + 1 < n &&
                   text::IsAlnumOrMark(cps[j + 1]) &&
                   // Commas only glue digit groups ("1,000"), never words.
                   (cps[j] != U',' ||
                    (text::IsDigit(cps[j - 1]) && text::IsDigit(cps[j + 1])))) {
          j += 2;
        } else {
          break;
        }
      }
      emit(i, j);
      i = j;
    } else if (cps[i] == U'.') {
      size_t j = i + 1;
      while (j < n && cps[j] == U'.') ++j;
      emit(i, j);
      i = j;
    } else {
      emit(i, i + 1);
      ++i;
    }
  }
}

bool IsTerminal(std::string_view s) {
  return s == "." || s == "!" || s == "?" || s == "…" || s == "...";
}

bool IsClosing(std::string_view s) {
  return s == "\"" || s == "”" || s == "'" || s == "’" || s == ")" || s == "]" ||
         s == "»" || s == "}";
}

bool IsOpening(std::string_view s) {
  return s == "\"" || s == "“" || s == "'" || s == "‘" || s == "(" || s == "[" ||
         s == "«";
}

bool StartsUpperOrDigit(std::string_view s) {
  if (s.empty()) return false;
  size_t pos = 0;
  char32_t c = text::NextCodePoint(s, pos);
  return text::IsUpper(c) || text::IsDigit(c);
}

bool IsAbbreviation(std::string_view s) {
  static const std::unordered_set<std::string_view> kAbbreviations = {
      "TP", "Tp", "Mr", "Mrs", "Ms", "Dr", "ThS", "Th.S", "TS", "PGS",
      "GS", "St", "TT", "BS", "KS", "v.v", "Jr", "Sr", "No", "vs"};
  if (kAbbreviations.count(s)) return true;
  // A single upper-case initial, as in "Nguyễn V. A".
  size_t pos = 0;
  char32_t c = text::NextCodePoint(s, pos);
  return pos == s.size() && text::IsUpper(c);
}

// ---------------------------------------------------------------------------
// Key hashing

inline void HashCombine(size_t& seed, size_t v) {
  seed ^= v + 0x9E3779B97F4A7C15ULL + (seed << 12) + (seed >> 4);
}

struct FullKey {
  int template_id;
  std::array<int, kMaxRuleAtoms> values;
  RuleAction action;
  friend bool operator==(const FullKey&, const FullKey&) = default;
};

struct FullKeyHash {
  size_t operator()(const FullKey& k) const {
    size_t seed = static_cast<size_t>(k.template_id) * 31 + static_cast<size_t>(k.action);
    for (int v : k.values) HashCombine(seed, static_cast<size_t>(static_cast<uint32_t>(v)));
    return seed;
  }
};

const char* AtomKindName(AtomKind kind) {
  switch (kind) {
    case AtomKind::kSyllable: return "syl";
    case AtomKind::kCapShape: return "cap";
    case AtomKind::kLexiconPair: return "lex";
    case AtomKind::kDecision: return "dec";
  }
  return "?";
}

}  // namespace

std::vector<SyllableSequence> SplitAndTokenize(std::string_view raw_text) {
  const std::string normalized = text::NormalizeNfc(raw_text);
  std::string_view s = normalized;

  std::vector<RawSyllable> syllables;
  size_t pos = 0;
  bool space_before = false;
  while (pos < s.size()) {
    size_t chunk_start = pos;
    char32_t c = text::NextCodePoint(s, pos);
    if (text::IsWhitespace(c)) {
      space_before = true;
      continue;
    }
    size_t chunk_end = pos;
    while (chunk_end < s.size()) {
      size_t next = chunk_end;
      if (text::IsWhitespace(text::NextCodePoint(s, next))) break;
      chunk_end = next;
    }
    TokenizeChunk(s.substr(chunk_start, chunk_end - chunk_start),
                  space_before || chunk_start == 0, syllables);
    pos = chunk_end;
    space_before = false;
  }

  std::vector<SyllableSequence> sentences;
  SyllableSequence current;
  const size_t n = syllables.size();
  for (size_t i = 0; i < n; ++i) {
    current.push_back(syllables[i].text);
    if (!IsTerminal(syllables[i].text)) continue;
    const bool after_abbreviation = syllables[i].text == "." && i > 0 &&
                                    !syllables[i].space_before &&
                                    IsAbbreviation(syllables[i - 1].text);
    // Absorb further terminal marks and closing quotes/brackets.
    size_t j = i + 1;
    while (j < n && !syllables[j].space_before &&
           (IsTerminal(syllables[j].text) || IsClosing(syllables[j].text))) {
      current.push_back(syllables[j].text);
      ++j;
    }
    i = j - 1;
    if (j >= n) break;
    const RawSyllable& next = syllables[j];
    bool boundary = next.space_before && !after_abbreviation &&
                    (StartsUpperOrDigit(next.text) ||
                     (IsOpening(next.text) && j + 1 < n &&
                      StartsUpperOrDigit(syllables[j + 1].text)));
    if (boundary) {
      sentences.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

// ---------------------------------------------------------------------------

int SyllableVocab::Intern(std::string_view syllable) {
  auto it = ids_.find(syllable);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.emplace_back(syllable);
  ids_.emplace(names_.back(), id);
  return id;
}

int SyllableVocab::Find(std::string_view syllable) const {
  auto it = ids_.find(syllable);
  return it == ids_.end() ? kUnknownSyllable : it->second;
}

int Lexicon::Child(int node, int syllable) const {
  if (syllable < 0) return -1;
  auto it = edges_.find((static_cast<uint64_t>(node) << 32) | static_cast<uint32_t>(syllable));
  return it == edges_.end() ? -1 : it->second;
}

void Lexicon::Add(std::span<const int> syllables) {
  if (syllables.empty()) return;
  int node = 0;
  for (int id : syllables) {
    const uint64_t key = (static_cast<uint64_t>(node) << 32) | static_cast<uint32_t>(id);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
      int child = static_cast<int>(terminal_.size());
      terminal_.push_back(0);
      edges_.emplace(key, child);
      node = child;
    } else {
      node = it->second;
    }
  }
  if (!terminal_[node]) {
    terminal_[node] = 1;
    ++entries_;
    words_.emplace_back(syllables.begin(), syllables.end());
    max_length_ = std::max(max_length_, static_cast<int>(syllables.size()));
  }
}

bool Lexicon::Contains(std::span<const int> syllables) const {
  if (syllables.empty()) return false;
  int node = 0;
  for (int id : syllables) {
    node = Child(node, id);
    if (node < 0) return false;
  }
  return terminal_[node] != 0;
}

int Lexicon::LongestMatch(std::span<const int> ids, size_t start) const {
  int node = 0;
  int best = 0;
  for (size_t i = start; i < ids.size(); ++i) {
    node = Child(node, ids[i]);
    if (node < 0) break;
    if (terminal_[node]) best = static_cast<int>(i - start + 1);
  }
  return best;
}

// ---------------------------------------------------------------------------

std::string RuleTemplate::Name() const {
  std::string out;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) out += ' ';
    out += AtomKindName(atoms[i].kind);
    out += '@';
    out += std::to_string(atoms[i].offset);
  }
  return out;
}

RuleTemplate RuleTemplate::Parse(std::string_view name) {
  RuleTemplate t;
  for (std::string_view piece : text::SplitFields(name)) {
    size_t at = piece.find('@');
    if (at == std::string_view::npos) throw FormatError("bad rule template '" + std::string(name) + "'");
    std::string_view kind = piece.substr(0, at);
    RuleAtom atom{};
    if (kind == "syl") {
      atom.kind = AtomKind::kSyllable;
    } else if (kind == "cap") {
      atom.kind = AtomKind::kCapShape;
    } else if (kind == "lex") {
      atom.kind = AtomKind::kLexiconPair;
    } else if (kind == "dec") {
      atom.kind = AtomKind::kDecision;
    } else {
      throw FormatError("unknown rule atom '" + std::string(piece) + "'");
    }
    atom.offset = std::stoi(std::string(piece.substr(at + 1)));
    if (atom.kind == AtomKind::kDecision && atom.offset != -1 && atom.offset != 1) {
      throw FormatError("decision atoms must look at an adjacent boundary");
    }
    t.atoms.push_back(atom);
  }
  if (t.atoms.empty() || t.atoms.size() > kMaxRuleAtoms) {
    throw FormatError("rule template must have 1.." + std::to_string(kMaxRuleAtoms) + " atoms");
  }
  return t;
}

std::vector<RuleTemplate> DefaultRuleTemplates(int window_radius) {
  if (window_radius < 1) throw ConfigError("window radius must be at least 1");
  // Syllable offsets must lie in [1 - radius, radius].
  static const char* kTemplates[] = {
      "syl@0 syl@1",
      "syl@0",
      "syl@1",
      "cap@0 cap@1",
      "syl@0 cap@1",
      "cap@0 syl@1",
      "lex@0 cap@0 cap@1",
      "syl@-1 syl@0 syl@1",
      "syl@0 syl@1 syl@2",
      "syl@-1 syl@0",
      "syl@1 syl@2",
      "syl@-1 syl@1",
      "cap@-1 cap@0 cap@1 cap@2",
      "lex@-1 lex@0 lex@1",
      "syl@0 syl@1 dec@-1",
      "syl@0 syl@1 dec@1",
      "cap@0 cap@1 dec@-1",
      "syl@-2 syl@-1 syl@0 syl@1",
      "syl@0 syl@1 syl@2 syl@3",
  };
  std::vector<RuleTemplate> out;
  for (const char* name : kTemplates) {
    RuleTemplate t = RuleTemplate::Parse(name);
    bool fits = true;
    for (const RuleAtom& a : t.atoms) {
      int lo = a.offset, hi = a.offset;
      if (a.kind == AtomKind::kLexiconPair) hi = a.offset + 1;
      if (a.kind == AtomKind::kDecision) {
        lo = a.offset;
        hi = a.offset + 1;
      }
      if (lo < 1 - window_radius || hi > window_radius) fits = false;
    }
    if (fits) out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

size_t SegmenterModel::StaticKeyHash::operator()(const StaticKey& k) const {
  size_t seed = static_cast<size_t>(k.template_id);
  for (int v : k.values) HashCombine(seed, static_cast<size_t>(static_cast<uint32_t>(v)));
  return seed;
}

SegmenterModel::Encoded SegmenterModel::Encode(std::span<const std::string> syllables) const {
  Encoded enc;
  const size_t n = syllables.size();
  enc.ids.resize(n);
  enc.caps.resize(n);
  for (size_t i = 0; i < n; ++i) {
    enc.ids[i] = vocab_.Find(syllables[i]);
    enc.caps[i] = static_cast<uint8_t>(text::ShapeOf(syllables[i]));
  }
  enc.lexicon_pair.assign(n > 0 ? n - 1 : 0, 0);
  for (size_t i = 0; i + 1 < n; ++i) {
    enc.lexicon_pair[i] = lexicon_.Contains(std::span<const int>(enc.ids.data() + i, 2));
  }
  return enc;
}

int SegmenterModel::AtomValue(const RuleAtom& atom, const Encoded& s,
                              const std::vector<uint8_t>& decisions, int boundary) const {
  const int n = static_cast<int>(s.ids.size());
  const int p = boundary + atom.offset;
  switch (atom.kind) {
    case AtomKind::kSyllable:
      if (p < 0) return kBeforeStart;
      if (p >= n) return kAfterEnd;
      return s.ids[p];
    case AtomKind::kCapShape:
      return p < 0 || p >= n ? kCapOutOfRange : s.caps[p];
    case AtomKind::kLexiconPair:
      return p < 0 || p >= n - 1 ? kOutOfRange : s.lexicon_pair[p];
    case AtomKind::kDecision:
      return p < 0 || p >= n - 1 ? kOutOfRange : decisions[p];
  }
  return 0;
}

SegmenterModel::StaticKey SegmenterModel::StaticKeyAt(int template_id, const Encoded& s,
                                                      int boundary) const {
  static const std::vector<uint8_t> kNoDecisions;
  StaticKey key{template_id, {}};
  const RuleTemplate& t = templates_[template_id];
  for (size_t a = 0; a < t.atoms.size(); ++a) {
    if (t.atoms[a].kind == AtomKind::kDecision) continue;
    key.values[a] = AtomValue(t.atoms[a], s, kNoDecisions, boundary);
  }
  return key;
}

void SegmenterModel::RebuildRuleIndex() {
  rule_index_.clear();
  for (size_t r = 0; r < rules_.size(); ++r) {
    const TransformationRule& rule = rules_[r];
    StaticKey key{rule.template_id, {}};
    const RuleTemplate& t = templates_[rule.template_id];
    for (size_t a = 0; a < t.atoms.size(); ++a) {
      if (t.atoms[a].kind != AtomKind::kDecision) key.values[a] = rule.values[a];
    }
    rule_index_[key].push_back(static_cast<int>(r));
  }
}

std::vector<uint8_t> SegmenterModel::LongestMatch(const Encoded& s) const {
  const size_t n = s.ids.size();
  std::vector<uint8_t> decisions(n > 0 ? n - 1 : 0, 0);
  size_t i = 0;
  while (i < n) {
    size_t len = static_cast<size_t>(std::max(1, lexicon_.LongestMatch(s.ids, i)));
    for (size_t k = i; k + 1 < i + len; ++k) decisions[k] = 1;
    i += len;
  }
  return decisions;
}

void SegmenterModel::ApplyRules(const Encoded& s, std::vector<uint8_t>& decisions) const {
  if (rules_.empty() || decisions.empty()) return;
  const int boundaries = static_cast<int>(decisions.size());
  // Static conditions never change while rules run, so candidate
  // (rule, boundary) pairs can be collected up front.
  std::vector<std::pair<int, int>> matches;
  for (int b = 0; b < boundaries; ++b) {
    for (int t = 0; t < static_cast<int>(templates_.size()); ++t) {
      auto it = rule_index_.find(StaticKeyAt(t, s, b));
      if (it == rule_index_.end()) continue;
      for (int r : it->second) matches.emplace_back(r, b);
    }
  }
  std::sort(matches.begin(), matches.end());
  for (const auto& [r, b] : matches) {
    const TransformationRule& rule = rules_[r];
    const RuleTemplate& t = templates_[rule.template_id];
    bool ok = true;
    for (size_t a = 0; a < t.atoms.size() && ok; ++a) {
      if (t.atoms[a].kind == AtomKind::kDecision) {
        ok = AtomValue(t.atoms[a], s, decisions, b) == rule.values[a];
      }
    }
    if (ok) decisions[b] = static_cast<uint8_t>(rule.action);
  }
}

std::vector<uint8_t> SegmenterModel::BaselineBoundaries(
    std::span<const std::string> syllables) const {
  return LongestMatch(Encode(syllables));
}

std::vector<uint8_t> SegmenterModel::Boundaries(std::span<const std::string> syllables) const {
  Encoded enc = Encode(syllables);
  std::vector<uint8_t> decisions = LongestMatch(enc);
  ApplyRules(enc, decisions);
  return decisions;
}

Sentence SegmenterModel::Segment(std::span<const std::string> syllables) const {
  if (syllables.empty()) return Sentence();
  return WordsFromBoundaries(syllables, Boundaries(syllables));
}

std::string SegmenterModel::DescribeRule(const TransformationRule& rule) const {
  const RuleTemplate& t = templates_[rule.template_id];
  std::string out = rule.action == RuleAction::kJoin ? "join" : "split";
  out += " if";
  for (size_t a = 0; a < t.atoms.size(); ++a) {
    out += ' ';
    out += AtomKindName(t.atoms[a].kind);
    out += '@' + std::to_string(t.atoms[a].offset) + '=';
    int v = rule.values[a];
    if (t.atoms[a].kind == AtomKind::kSyllable) {
      out += v == kBeforeStart ? std::string(kBosName)
             : v == kAfterEnd  ? std::string(kEosName)
                               : vocab_.Name(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

void SegmenterModel::Save(std::ostream& out) const {
  auto syllable = [&](int id) -> std::string {
    if (id == kBeforeStart) return std::string(kBosName);
    if (id == kAfterEnd) return std::string(kEosName);
    return vocab_.Name(id);
  };
  out << kFormatTag << ' ' << kFormatVersion << '\n';
  out << "window " << window_radius_ << '\n';
  out << "templates " << templates_.size() << '\n';
  for (const RuleTemplate& t : templates_) out << t.Name() << '\n';

  std::vector<std::string> words;
  words.reserve(lexicon_.size());
  for (const std::vector<int>& w : lexicon_.words()) {
    std::string form;
    for (size_t i = 0; i < w.size(); ++i) {
      if (i > 0) form += '_';
      form += vocab_.Name(w[i]);
    }
    words.push_back(std::move(form));
  }
  std::sort(words.begin(), words.end());
  out << "lexicon " << words.size() << '\n';
  for (const std::string& w : words) out << w << '\n';

  out << "rules " << rules_.size() << '\n';
  for (const TransformationRule& rule : rules_) {
    const RuleTemplate& t = templates_[rule.template_id];
    out << (rule.action == RuleAction::kJoin ? "join" : "split") << '\t' << rule.template_id;
    for (size_t a = 0; a < t.atoms.size(); ++a) {
      out << '\t';
      if (t.atoms[a].kind == AtomKind::kSyllable) {
        out << syllable(rule.values[a]);
      } else {
        out << rule.values[a];
      }
    }
    out << '\t' << rule.score << '\n';
  }
}

SegmenterModel SegmenterModel::Load(std::istream& in) {
  SegmenterModel model;
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::string_view {
    if (!std::getline(in, line)) throw ModelError("truncated segmenter model");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  auto header = [&](std::string_view key) -> int {
    std::vector<std::string_view> f = text::SplitFields(next_line());
    if (f.size() != 2 || f[0] != key) {
      throw ModelError("segmenter model line " + std::to_string(lineno) + ": expected '" +
                       std::string(key) + " <n>'");
    }
    return std::stoi(std::string(f[1]));
  };

  std::vector<std::string_view> magic = text::SplitFields(next_line());
  if (magic.size() != 2 || magic[0] != kFormatTag) throw ModelError("not a segmenter model");
  if (std::stoi(std::string(magic[1])) != kFormatVersion) {
    throw ModelError("unsupported segmenter model version " + std::string(magic[1]));
  }
  try {
    model.window_radius_ = header("window");
    const int num_templates = header("templates");
    for (int i = 0; i < num_templates; ++i) {
      model.templates_.push_back(RuleTemplate::Parse(next_line()));
    }
    const int num_words = header("lexicon");
    std::vector<int> ids;
    for (int i = 0; i < num_words; ++i) {
      ids.clear();
      for (const std::string& syl : SyllablesOf(next_line())) {
        ids.push_back(model.vocab_.Intern(syl));
      }
      model.lexicon_.Add(ids);
    }
    const int num_rules = header("rules");
    for (int i = 0; i < num_rules; ++i) {
      std::vector<std::string_view> f = text::Split(next_line(), '\t');
      if (f.size() < 3) throw ModelError("segmenter model line " + std::to_string(lineno) + ": bad rule");
      TransformationRule rule;
      if (f[0] == "join") {
        rule.action = RuleAction::kJoin;
      } else if (f[0] == "split") {
        rule.action = RuleAction::kSplit;
      } else {
        throw ModelError("segmenter model line " + std::to_string(lineno) + ": bad action");
      }
      rule.template_id = std::stoi(std::string(f[1]));
      if (rule.template_id < 0 || rule.template_id >= num_templates) {
        throw ModelError("segmenter model line " + std::to_string(lineno) + ": bad template id");
      }
      const RuleTemplate& t = model.templates_[rule.template_id];
      if (f.size() != t.atoms.size() + 3) {
        throw ModelError("segmenter model line " + std::to_string(lineno) + ": wrong value count");
      }
      for (size_t a = 0; a < t.atoms.size(); ++a) {
        std::string_view v = f[2 + a];
        if (t.atoms[a].kind == AtomKind::kSyllable) {
          rule.values[a] = v == kBosName   ? kBeforeStart
                           : v == kEosName ? kAfterEnd
                                           : model.vocab_.Intern(v);
        } else {
          rule.values[a] = std::stoi(std::string(v));
        }
      }
      rule.score = std::stoi(std::string(f.back()));
      model.rules_.push_back(rule);
    }
  } catch (const std::invalid_argument&) {
    throw ModelError("segmenter model line " + std::to_string(lineno) + ": bad number");
  } catch (const std::out_of_range&) {
    throw ModelError("segmenter model line " + std::to_string(lineno) + ": number out of range");
  } catch (const FormatError& e) {
    throw ModelError("segmenter model line " + std::to_string(lineno) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ModelError("segmenter model line " + std::to_string(lineno) + ": " + e.what());
  }
  model.RebuildRuleIndex();
  return model;
}

void SegmenterModel::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  Save(out);
  if (!out) throw IoError("error writing '" + path + "'");
}

SegmenterModel SegmenterModel::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open segmenter model '" + path + "'");
  return Load(in);
}

// ---------------------------------------------------------------------------

Sentence WordsFromBoundaries(std::span<const std::string> syllables,
                             const std::vector<uint8_t>& decisions) {
  Sentence sentence;
  std::string form;
  for (size_t i = 0; i < syllables.size(); ++i) {
    if (!form.empty()) form += '_';
    form += syllables[i];
    if (i + 1 == syllables.size() || !decisions[i]) {
      sentence.Add(std::move(form));
      form.clear();
    }
  }
  return sentence;
}

std::vector<uint8_t> GoldBoundaries(const std::vector<std::string>& words,
                                    std::vector<std::string>* syllables) {
  std::vector<uint8_t> decisions;
  syllables->clear();
  for (const std::string& w : words) {
    std::vector<std::string> parts = SyllablesOf(w);
    for (size_t k = 0; k < parts.size(); ++k) {
      if (!syllables->empty()) decisions.push_back(k > 0 ? 1 : 0);
      syllables->push_back(std::move(parts[k]));
    }
  }
  return decisions;
}

// Error-driven rule learner. Holds the training corpus with its gold and
// current boundary decisions.
class SegmenterTrainer {
 public:
  SegmenterTrainer(SegmenterModel& model, const std::vector<std::vector<std::string>>& gold)
      : model_(model) {
    std::vector<std::string> syllables;
    for (const std::vector<std::string>& words : gold) {
      Item item;
      item.gold = GoldBoundaries(words, &syllables);
      if (syllables.empty()) continue;
      for (const std::string& w : words) {
        std::vector<int> ids;
        for (const std::string& syl : SyllablesOf(w)) ids.push_back(model_.vocab_.Intern(syl));
        model_.lexicon_.Add(ids);
      }
      item.syllables = syllables;
      items_.push_back(std::move(item));
    }
    for (Item& item : items_) {
      item.enc = model_.Encode(item.syllables);
      item.current = model_.LongestMatch(item.enc);
    }
  }

  int boundaries() const {
    int n = 0;
    for (const Item& item : items_) n += static_cast<int>(item.gold.size());
    return n;
  }

  int Errors() const {
    int errors = 0;
    for (const Item& item : items_) {
      for (size_t b = 0; b < item.gold.size(); ++b) errors += item.gold[b] != item.current[b];
    }
    return errors;
  }

  // Finds the best rule for the current corpus state; returns false if no
  // rule has a positive score.
  bool BestRule(TransformationRule& best) {
    const auto& templates = model_.templates_;
    const int num_templates = static_cast<int>(templates.size());

    struct Candidate {
      TransformationRule rule;
      int delta = 0;  // change in error count
      int last_item = -1;
      int last_boundary = -1;
      uint8_t last_value = 0;
    };
    std::vector<Candidate> candidates;
    std::unordered_map<FullKey, int, FullKeyHash> seen;
    std::unordered_map<SegmenterModel::StaticKey, std::vector<int>,
                       SegmenterModel::StaticKeyHash> groups;

    // Candidate rules: every template instantiated at every wrong boundary,
    // with the gold decision as action, in corpus scan order.
    for (const Item& item : items_) {
      for (int b = 0; b < static_cast<int>(item.gold.size()); ++b) {
        if (item.gold[b] == item.current[b]) continue;
        for (int t = 0; t < num_templates; ++t) {
          FullKey key{t, {}, static_cast<RuleAction>(item.gold[b])};
          const RuleTemplate& tmpl = templates[t];
          for (size_t a = 0; a < tmpl.atoms.size(); ++a) {
            key.values[a] = model_.AtomValue(tmpl.atoms[a], item.enc, item.current, b);
          }
          auto [it, inserted] = seen.emplace(key, static_cast<int>(candidates.size()));
          if (!inserted) continue;
          Candidate c;
          c.rule.template_id = t;
          c.rule.values = key.values;
          c.rule.action = key.action;
          candidates.push_back(c);
          SegmenterModel::StaticKey skey{t, {}};
          for (size_t a = 0; a < tmpl.atoms.size(); ++a) {
            if (tmpl.atoms[a].kind != AtomKind::kDecision) skey.values[a] = key.values[a];
          }
          groups[skey].push_back(it->second);
        }
      }
    }
    if (candidates.empty()) return false;

    // Exact scoring: simulate each candidate's left-to-right application.
    // Decision atoms only look one boundary away, so the only earlier
    // application a candidate can observe is the one at b-1.
    for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
      const Item& item = items_[i];
      for (int b = 0; b < static_cast<int>(item.gold.size()); ++b) {
        for (int t = 0; t < num_templates; ++t) {
          auto git = groups.find(model_.StaticKeyAt(t, item.enc, b));
          if (git == groups.end()) continue;
          for (int ci : git->second) {
            Candidate& c = candidates[ci];
            const RuleTemplate& tmpl = templates[t];
            bool ok = true;
            for (size_t a = 0; a < tmpl.atoms.size() && ok; ++a) {
              if (tmpl.atoms[a].kind != AtomKind::kDecision) continue;
              const int q = b + tmpl.atoms[a].offset;
              int v;
              if (q < 0 || q >= static_cast<int>(item.gold.size())) {
                v = kOutOfRange;
              } else if (c.last_item == i && c.last_boundary == q) {
                v = c.last_value;
              } else {
                v = item.current[q];
              }
              ok = v == c.rule.values[a];
            }
            const uint8_t action = static_cast<uint8_t>(c.rule.action);
            if (!ok || item.current[b] == action) continue;
            c.delta += item.gold[b] == action ? -1 : 1;
            c.last_item = i;
            c.last_boundary = b;
            c.last_value = action;
          }
        }
      }
    }

    int best_index = -1;
    int best_score = 0;
    for (int ci = 0; ci < static_cast<int>(candidates.size()); ++ci) {
      const int score = -candidates[ci].delta;
      if (score > best_score) {
        best_score = score;
        best_index = ci;
      }
    }
    if (best_index < 0) return false;
    best = candidates[best_index].rule;
    best.score = best_score;
    return true;
  }

  void Apply(const TransformationRule& rule) {
    model_.rules_.push_back(rule);
    model_.RebuildRuleIndex();
    // Only the new rule needs to run over the current decisions.
    SegmenterModel single;
    single.templates_ = model_.templates_;
    single.rules_ = {rule};
    single.RebuildRuleIndex();
    for (Item& item : items_) single.ApplyRules(item.enc, item.current);
  }

 private:
  struct Item {
    std::vector<std::string> syllables;
    SegmenterModel::Encoded enc;
    std::vector<uint8_t> gold;
    std::vector<uint8_t> current;
  };
  SegmenterModel& model_;
  std::vector<Item> items_;
};

SegmenterModel TrainSegmenter(const std::vector<std::vector<std::string>>& gold,
                              const SegmenterOptions& options, SegmenterTrainingLog* log) {
  if (gold.empty()) throw TrainingError("empty segmentation corpus");
  SegmenterModel model;
  model.window_radius_ = options.window_radius;
  model.templates_ = DefaultRuleTemplates(options.window_radius);

  SegmenterTrainer trainer(model, gold);
  if (trainer.boundaries() == 0 && model.lexicon_.size() == 0) {
    throw TrainingError("segmentation corpus has no words");
  }
  int errors = trainer.Errors();
  if (log) {
    log->boundaries = trainer.boundaries();
    log->baseline_errors = errors;
    log->errors_after_rule.clear();
  }
  TransformationRule rule;
  while (static_cast<int>(model.rules_.size()) < options.max_rules && trainer.BestRule(rule)) {
    trainer.Apply(rule);
    const int after = trainer.Errors();
    if (after != errors - rule.score) {
      throw std::logic_error("segmenter training: rule score does not match its effect");
    }
    errors = after;
    if (log) log->errors_after_rule.push_back(errors);
  }
  return model;
}

}  // namespace sylpipe::wseg
