#ifndef SYLPIPE_ANNOTATION_H_
#define SYLPIPE_ANNOTATION_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sylpipe {

// One segmented word and the annotation slots the pipeline fills in.
//
// Multi-syllable words join their syllables with '_'. `head` is the 1-based
// index of the governing token, 0 for the artificial root. An unset NER label
// means "O": the two compare equal and serialize identically.
struct Token {
  int index = 0;
  std::string form;
  std::optional<std::string> pos_tag;
  std::optional<std::string> ner_label;
  std::optional<int> head;
  std::optional<std::string> dep_label;

  // The NER label with the unset case resolved to "O".
  std::string_view ner_or_outside() const {
    return ner_label ? std::string_view(*ner_label) : std::string_view("O");
  }

  friend bool operator==(const Token& a, const Token& b) {
    return a.index == b.index && a.form == b.form && a.pos_tag == b.pos_tag &&
           a.ner_or_outside() == b.ner_or_outside() && a.head == b.head &&
           a.dep_label == b.dep_label;
  }
};

struct Sentence {
  std::vector<Token> tokens;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  Token& operator[](size_t i) { return tokens[i]; }
  const Token& operator[](size_t i) const { return tokens[i]; }

  // Appends a token with the next index.
  Token& Add(std::string form);

  std::vector<std::string> Forms() const;
  bool AllHeadsSet() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// The annotation object every pipeline stage writes into.
struct Document {
  std::string raw_text;
  std::vector<Sentence> sentences;

  Document() = default;
  explicit Document(std::string text) : raw_text(std::move(text)) {}

  size_t WordCount() const;
  // Six-column rendering of every sentence.
  std::string ToString() const;
};

// Checks the Token and Sentence invariants. Returns an empty string when the
// sentence is valid, otherwise a description of the first violation.
std::string ValidateSentence(const Sentence& sentence);

// True if heads are all set, exactly one token hangs off the root with label
// "root" (when labels are set), and following heads never cycles.
bool IsWellFormedTree(const Sentence& sentence);

// ---------------------------------------------------------------------------
// Six-column format: index, form, POS, NER, head, relation; tab-separated.
// Unset POS/head/relation render as "_", an unset NER label as "O".
// Sentences are separated by exactly one blank line.

std::string ToSixColumn(const Sentence& sentence);
std::string ToSixColumn(const std::vector<Sentence>& sentences);

// Inverse of ToSixColumn. Throws FormatError naming the offending line.
std::vector<Sentence> FromSixColumn(std::string_view text);

// ---------------------------------------------------------------------------
// Column corpora. Each non-blank line is one token; blank lines separate
// sentences. The column count selects the layout:
//   2  form, POS                      (tagging corpora)
//   3  form, POS, BIO label           (NER corpora)
//   6  the six-column format above
//   10 CoNLL-X: ID FORM LEMMA CPOS POS FEATS HEAD DEPREL PHEAD PDEPREL
// Every line in one file must use the same layout. Forms are NFC-normalized.
// Lines starting with "#" and containing no tab are comments.
enum class ColumnLayout { kTagged = 2, kNer = 3, kSixColumn = 6, kConllX = 10 };

struct ColumnCorpus {
  ColumnLayout layout = ColumnLayout::kSixColumn;
  std::vector<Sentence> sentences;
};

ColumnCorpus ReadColumnCorpus(std::string_view text);
ColumnCorpus ReadColumnCorpusFile(const std::string& path);

// Writes sentences as two- or three-column blocks.
std::string ToTaggedColumns(const std::vector<Sentence>& sentences);
std::string ToNerColumns(const std::vector<Sentence>& sentences);

// ---------------------------------------------------------------------------
// Segmented text: one sentence per line, words separated by spaces,
// syllables inside a word joined by '_'.

std::vector<std::vector<std::string>> ReadSegmentedText(std::string_view text);
std::string ToSegmentedLine(const Sentence& sentence);

// Splits a word form into its syllables ('_' separated).
std::vector<std::string> SyllablesOf(std::string_view form);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace sylpipe

#endif  // SYLPIPE_ANNOTATION_H_
