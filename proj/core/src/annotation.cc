#include "sylpipe/annotation.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sylpipe/errors.h"
#include "sylpipe/text.h"

namespace sylpipe {
namespace {

constexpr std::string_view kUnset = "_";

bool ParseInt(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool IsBlank(std::string_view line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

bool IsValidBioSyntax(std::string_view label) {
  if (label == "O") return true;
  return label.size() > 2 && (label[0] == 'B' || label[0] == 'I') &&
         label[1] == '-';
}

bool HasWhitespace(std::string_view s) {
  return s.find_first_of(" \t\n\r") != std::string_view::npos;
}

std::optional<std::string> OptionalField(std::string_view field) {
  if (field == kUnset) return std::nullopt;
  return std::string(field);
}

// Iterates over lines, stripping a trailing '\r'. Line numbers are 1-based.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool Next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_number_;
    return true;
  }
  int line_number() const { return line_number_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_number_ = 0;
};

// Checks head ranges once a block is complete; `first_line` is the line
// number of the block's first token.
void CheckHeads(const Sentence& sentence, int first_line) {
  const int n = static_cast<int>(sentence.size());
  for (int i = 0; i < n; ++i) {
    const Token& token = sentence.tokens[i];
    if (!token.head) continue;
    if (*token.head < 0 || *token.head > n) {
      throw FormatError("head " + std::to_string(*token.head) +
                            " out of range for a sentence of " +
                            std::to_string(n) + " tokens",
                        first_line + i);
    }
    if (*token.head == token.index) {
      throw FormatError("token is its own head", first_line + i);
    }
  }
}

Token ParseSixColumnFields(const std::vector<std::string_view>& fields,
                           int expected_index, int line) {
  Token token;
  if (!ParseInt(fields[0], token.index)) {
    throw FormatError("non-numeric token index '" + std::string(fields[0]) + "'",
                      line);
  }
  if (token.index != expected_index) {
    throw FormatError("expected token index " + std::to_string(expected_index) +
                          ", found " + std::to_string(token.index),
                      line);
  }
  if (fields[1].empty()) {
    throw FormatError("empty word form", line);
  }
  if (HasWhitespace(fields[1])) throw FormatError("word form contains whitespace", line);
  token.form = std::string(fields[1]);
  token.pos_tag = OptionalField(fields[2]);
  if (fields[3] != kUnset) {
    if (!IsValidBioSyntax(fields[3])) {
      throw FormatError("invalid NER label '" + std::string(fields[3]) + "'", line);
    }
    token.ner_label = std::string(fields[3]);
  }
  if (fields[4] != kUnset) {
    int head = 0;
    if (!ParseInt(fields[4], head) || head < 0) {
      throw FormatError("non-numeric head '" + std::string(fields[4]) + "'", line);
    }
    token.head = head;
  }
  token.dep_label = OptionalField(fields[5]);
  return token;
}

}  // namespace

Token& Sentence::Add(std::string form) {
  Token token;
  token.index = static_cast<int>(tokens.size()) + 1;
  token.form = std::move(form);
  tokens.push_back(std::move(token));
  return tokens.back();
}

std::vector<std::string> Sentence::Forms() const {
  std::vector<std::string> forms;
  forms.reserve(tokens.size());
  for (const Token& t : tokens) forms.push_back(t.form);
  return forms;
}

bool Sentence::AllHeadsSet() const {
  for (const Token& t : tokens) {
    if (!t.head) return false;
  }
  return true;
}

size_t Document::WordCount() const {
  size_t n = 0;
  for (const Sentence& s : sentences) n += s.size();
  return n;
}

std::string Document::ToString() const { return ToSixColumn(sentences); }

std::string ValidateSentence(const Sentence& sentence) {
  const int n = static_cast<int>(sentence.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = sentence.tokens[i];
    std::string where = "token " + std::to_string(i + 1) + ": ";
    if (t.index != i + 1) return where + "index is " + std::to_string(t.index);
    if (t.form.empty()) return where + "empty form";
    if (HasWhitespace(t.form)) return where + "form contains whitespace";
    if (t.head && (*t.head < 0 || *t.head > n || *t.head == t.index)) {
      return where + "invalid head " + std::to_string(*t.head);
    }
    if (t.ner_label && !IsValidBioSyntax(*t.ner_label)) {
      return where + "invalid NER label " + *t.ner_label;
    }
  }
  if (n > 0 && sentence.AllHeadsSet() && !IsWellFormedTree(sentence)) {
    return "heads do not form a single-rooted tree";
  }
  return "";
}

bool IsWellFormedTree(const Sentence& sentence) {
  const int n = static_cast<int>(sentence.size());
  int roots = 0;
  for (const Token& t : sentence.tokens) {
    if (!t.head || *t.head < 0 || *t.head > n || *t.head == t.index) return false;
    if (*t.head == 0) {
      ++roots;
      if (t.dep_label && *t.dep_label != "root") return false;
    }
  }
  if (roots != 1) return false;
  // Every token must reach the root within n steps.
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    int steps = 0;
    while (cur != 0) {
      cur = *sentence.tokens[cur - 1].head;
      if (++steps > n) return false;
    }
  }
  return true;
}

std::string ToSixColumn(const Sentence& sentence) {
  std::string out;
  for (const Token& t : sentence.tokens) {
    out += std::to_string(t.index);
    out += '\t';
    out += t.form;
    out += '\t';
    out += t.pos_tag ? std::string_view(*t.pos_tag) : kUnset;
    out += '\t';
    out += t.ner_or_outside();
    out += '\t';
    if (t.head) {
      out += std::to_string(*t.head);
    } else {
      out += kUnset;
    }
    out += '\t';
    out += t.dep_label ? std::string_view(*t.dep_label) : kUnset;
    out += '\n';
  }
  return out;
}

std::string ToSixColumn(const std::vector<Sentence>& sentences) {
  std::string out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += '\n';
    out += ToSixColumn(sentences[i]);
  }
  return out;
}

std::vector<Sentence> FromSixColumn(std::string_view text) {
  std::vector<Sentence> sentences;
  Sentence current;
  int block_start = 0;
  LineReader reader(text);
  std::string_view line;
  auto flush = [&]() {
    if (current.empty()) return;
    CheckHeads(current, block_start);
    sentences.push_back(std::move(current));
    current = Sentence();
  };
  while (reader.Next(line)) {
    if (IsBlank(line)) {
      flush();
      continue;
    }
    std::vector<std::string_view> fields = text::Split(line, '\t');
    if (fields.size() != 6) {
      throw FormatError("expected 6 tab-separated columns, found " +
                            std::to_string(fields.size()),
                        reader.line_number());
    }
    if (current.empty()) block_start = reader.line_number();
    current.tokens.push_back(ParseSixColumnFields(
        fields, static_cast<int>(current.size()) + 1, reader.line_number()));
  }
  flush();
  return sentences;
}

ColumnCorpus ReadColumnCorpus(std::string_view text) {
  ColumnCorpus corpus;
  bool layout_known = false;
  Sentence current;
  int block_start = 0;
  LineReader reader(text);
  std::string_view line;
  auto flush = [&]() {
    if (current.empty()) return;
    if (corpus.layout == ColumnLayout::kSixColumn ||
        corpus.layout == ColumnLayout::kConllX) {
      CheckHeads(current, block_start);
    }
    corpus.sentences.push_back(std::move(current));
    current = Sentence();
  };
  while (reader.Next(line)) {
    const int lineno = reader.line_number();
    if (IsBlank(line)) {
      flush();
      continue;
    }
    // "# ..." lines without tabs are comments (CoNLL-X sentence metadata).
    if (line.front() == '#' && line.find('\t') == std::string_view::npos) continue;
    std::vector<std::string_view> fields = line.find('\t') != std::string_view::npos
                                               ? text::Split(line, '\t')
                                               : text::SplitFields(line);
    if (!layout_known) {
      switch (fields.size()) {
        case 2: corpus.layout = ColumnLayout::kTagged; break;
        case 3: corpus.layout = ColumnLayout::kNer; break;
        case 6: corpus.layout = ColumnLayout::kSixColumn; break;
        case 10: corpus.layout = ColumnLayout::kConllX; break;
        default:
          throw FormatError("unsupported column count " + std::to_string(fields.size()),
                            lineno);
      }
      layout_known = true;
    }
    if (fields.size() != static_cast<size_t>(corpus.layout)) {
      throw FormatError("expected " + std::to_string(static_cast<int>(corpus.layout)) +
                            " columns, found " + std::to_string(fields.size()),
                        lineno);
    }
    if (current.empty()) block_start = lineno;
    const int expected_index = static_cast<int>(current.size()) + 1;
    switch (corpus.layout) {
      case ColumnLayout::kTagged:
      case ColumnLayout::kNer: {
        Token& t = current.Add(text::NormalizeNfc(fields[0]));
        t.pos_tag = OptionalField(fields[1]);
        if (corpus.layout == ColumnLayout::kNer) {
          if (!IsValidBioSyntax(fields[2])) {
            throw FormatError("invalid NER label '" + std::string(fields[2]) + "'",
                              lineno);
          }
          t.ner_label = std::string(fields[2]);
        }
        break;
      }
      case ColumnLayout::kSixColumn: {
        Token t = ParseSixColumnFields(fields, expected_index, lineno);
        t.form = text::NormalizeNfc(t.form);
        current.tokens.push_back(std::move(t));
        break;
      }
      case ColumnLayout::kConllX: {
        // Multi-word ranges ("1-2") and empty nodes ("1.1") carry no tree.
        if (fields[0].find_first_of("-.") != std::string_view::npos) break;
        int index = 0;
        if (!ParseInt(fields[0], index) || index != expected_index) {
          throw FormatError("bad token index '" + std::string(fields[0]) + "'", lineno);
        }
        Token& t = current.Add(text::NormalizeNfc(fields[1]));
        t.pos_tag = OptionalField(fields[3] != kUnset ? fields[3] : fields[4]);
        if (fields[6] != kUnset) {
          int head = 0;
          if (!ParseInt(fields[6], head) || head < 0) {
            throw FormatError("non-numeric head '" + std::string(fields[6]) + "'", lineno);
          }
          t.head = head;
        }
        t.dep_label = OptionalField(fields[7]);
        break;
      }
    }
  }
  flush();
  return corpus;
}

ColumnCorpus ReadColumnCorpusFile(const std::string& path) {
  return ReadColumnCorpus(ReadFile(path));
}

std::string ToTaggedColumns(const std::vector<Sentence>& sentences) {
  std::string out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += '\n';
    for (const Token& t : sentences[i].tokens) {
      out += t.form;
      out += '\t';
      out += t.pos_tag.value_or("_");
      out += '\n';
    }
  }
  return out;
}

std::string ToNerColumns(const std::vector<Sentence>& sentences) {
  std::string out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += '\n';
    for (const Token& t : sentences[i].tokens) {
      out += t.form;
      out += '\t';
      out += t.pos_tag.value_or("_");
      out += '\t';
      out += t.ner_or_outside();
      out += '\n';
    }
  }
  return out;
}

std::vector<std::vector<std::string>> ReadSegmentedText(std::string_view text) {
  std::vector<std::vector<std::string>> sentences;
  LineReader reader(text);
  std::string_view line;
  while (reader.Next(line)) {
    std::vector<std::string> words;
    for (std::string_view w : text::SplitFields(line)) {
      words.push_back(text::NormalizeNfc(w));
    }
    if (!words.empty()) sentences.push_back(std::move(words));
  }
  return sentences;
}

std::string ToSegmentedLine(const Sentence& sentence) {
  std::string out;
  for (size_t i = 0; i < sentence.size(); ++i) {
    if (i > 0) out += ' ';
    out += sentence.tokens[i].form;
  }
  return out;
}

std::vector<std::string> SyllablesOf(std::string_view form) {
  std::vector<std::string> out;
  for (std::string_view piece : text::Split(form, '_')) {
    if (!piece.empty()) out.emplace_back(piece);
  }
  // A form made only of underscores is a single symbol syllable.
  if (out.empty() && !form.empty()) out.emplace_back(form);
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace sylpipe
