#include "sylpipe/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "sylpipe/errors.h"

namespace sylpipe::text {

std::string NormalizeNfc(std::string_view s) {
  // Pure ASCII is already NFC.
  bool ascii = true;
  for (unsigned char c : s) {
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(s);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (nfc->isNormalized(ustr, status) && U_SUCCESS(status)) {
    std::string out;
    ustr.toUTF8String(out);
    return out;
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc->normalize(ustr, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

char32_t NextCodePoint(std::string_view s, size_t& pos) {
  int32_t i = static_cast<int32_t>(pos);
  UChar32 c;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), i,
          static_cast<int32_t>(s.size()), c);
  pos = static_cast<size_t>(i);
  return c < 0 ? U'�' : static_cast<char32_t>(c);
}

void AppendUtf8(char32_t c, std::string& out) {
  uint8_t buf[4];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, 4, static_cast<UChar32>(c), error);
  if (error) {
    out += "\xEF\xBF\xBD";
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), len);
}

size_t CodePointCount(std::string_view s) {
  size_t count = 0;
  for (size_t pos = 0; pos < s.size(); ++count) NextCodePoint(s, pos);
  return count;
}

std::string_view PrefixCodePoints(std::string_view s, size_t n) {
  size_t pos = 0;
  for (size_t k = 0; k < n && pos < s.size(); ++k) NextCodePoint(s, pos);
  return s.substr(0, pos);
}

std::string_view SuffixCodePoints(std::string_view s, size_t n) {
  size_t total = CodePointCount(s);
  if (total <= n) return s;
  size_t pos = 0;
  for (size_t k = 0; k < total - n; ++k) NextCodePoint(s, pos);
  return s.substr(pos);
}

bool IsWhitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }
bool IsUpper(char32_t c) { return u_isupper(static_cast<UChar32>(c)); }
bool IsLetter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
bool IsDigit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

bool IsAlnumOrMark(char32_t c) {
  if (u_isalnum(static_cast<UChar32>(c))) return true;
  int8_t type = u_charType(static_cast<UChar32>(c));
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

CapShape ShapeOf(std::string_view s) {
  bool first_letter_seen = false;
  bool first_upper = false;
  bool any_lower = false;
  for (size_t pos = 0; pos < s.size();) {
    char32_t c = NextCodePoint(s, pos);
    if (!IsLetter(c)) continue;
    bool upper = IsUpper(c);
    if (!first_letter_seen) {
      first_letter_seen = true;
      first_upper = upper;
    }
    if (!upper) any_lower = true;
  }
  if (!first_letter_seen) return CapShape::kNoLetters;
  if (!first_upper) return CapShape::kLower;
  return any_lower ? CapShape::kTitle : CapShape::kUpper;
}

const char* CapShapeName(CapShape shape) {
  switch (shape) {
    case CapShape::kNoLetters: return "none";
    case CapShape::kLower: return "lower";
    case CapShape::kTitle: return "title";
    case CapShape::kUpper: return "upper";
  }
  return "none";
}

bool ContainsDigit(std::string_view s) {
  for (size_t pos = 0; pos < s.size();) {
    if (IsDigit(NextCodePoint(s, pos))) return true;
  }
  return false;
}

bool ContainsHyphen(std::string_view s) {
  return s.find('-') != std::string_view::npos;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace sylpipe::text
