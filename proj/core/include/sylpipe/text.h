#ifndef SYLPIPE_TEXT_H_
#define SYLPIPE_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the tokenizer and the feature extractors.
namespace sylpipe::text {

// Returns `s` in Unicode normalization form C. Invalid UTF-8 sequences are
// replaced by U+FFFD.
std::string NormalizeNfc(std::string_view s);

// Decodes the code point starting at `pos` and advances `pos` past it.
// Malformed input yields U+FFFD and advances by one byte.
char32_t NextCodePoint(std::string_view s, size_t& pos);

void AppendUtf8(char32_t c, std::string& out);

size_t CodePointCount(std::string_view s);

// The first / last `n` code points of `s` (all of `s` if shorter).
std::string_view PrefixCodePoints(std::string_view s, size_t n);
std::string_view SuffixCodePoints(std::string_view s, size_t n);

bool IsWhitespace(char32_t c);
bool IsUpper(char32_t c);
bool IsLetter(char32_t c);
bool IsDigit(char32_t c);
bool IsAlnumOrMark(char32_t c);

// Capitalization class of a token, used as a feature value.
enum class CapShape : uint8_t {
  kNoLetters = 0,  // punctuation, numbers
  kLower = 1,      // first letter lower case
  kTitle = 2,      // first letter upper case, some later letter lower case
  kUpper = 3,      // every letter upper case
};

CapShape ShapeOf(std::string_view s);
const char* CapShapeName(CapShape shape);

bool ContainsDigit(std::string_view s);
bool ContainsHyphen(std::string_view s);

// Splits on runs of ASCII spaces/tabs; no empty pieces.
std::vector<std::string_view> SplitFields(std::string_view line);
std::vector<std::string_view> Split(std::string_view s, char sep);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace sylpipe::text

#endif  // SYLPIPE_TEXT_H_
