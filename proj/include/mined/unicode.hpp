#pragma once

// Thin ICU wrappers: NFC, case folding to lowercase, whitespace and
// punctuation classes, extended grapheme cluster segmentation.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "mined/error.hpp"

namespace mined::unicode {

inline icu::UnicodeString fromUtf8(std::string_view s) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

inline std::string toUtf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString out = norm->normalize(fromUtf8(s), status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return toUtf8(out);
}

inline std::string lowercase(std::string_view s) {
  icu::UnicodeString u = fromUtf8(s);
  u.toLower(icu::Locale::getRoot());
  return toUtf8(u);
}

inline bool isSpace(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

// Runs of whitespace become a single ' '; leading and trailing runs vanish.
// With punctToSpace, punctuation code points are treated as whitespace.
inline std::string collapseSpaces(std::string_view s, bool collapse, bool punctToSpace) {
  icu::UnicodeString in = fromUtf8(s);
  icu::UnicodeString out;
  bool pendingSpace = false;
  for (int32_t i = 0; i < in.length();) {
    UChar32 c = in.char32At(i);
    i += U16_LENGTH(c);
    bool space = isSpace(c) || (punctToSpace && u_ispunct(c));
    if (!collapse) {
      out.append(space && punctToSpace && !isSpace(c) ? UChar32(' ') : c);
      continue;
    }
    if (space) {
      pendingSpace = out.length() > 0;
      continue;
    }
    if (pendingSpace) out.append(UChar32(' '));
    pendingSpace = false;
    out.append(c);
  }
  return toUtf8(out);
}

inline std::vector<std::string> splitWhitespace(std::string_view s) {
  icu::UnicodeString in = fromUtf8(s);
  std::vector<std::string> out;
  int32_t start = -1;
  for (int32_t i = 0; i < in.length();) {
    UChar32 c = in.char32At(i);
    int32_t next = i + U16_LENGTH(c);
    if (isSpace(c)) {
      if (start >= 0) out.push_back(toUtf8(in.tempSubStringBetween(start, i)));
      start = -1;
    } else if (start < 0) {
      start = i;
    }
    i = next;
  }
  if (start >= 0) out.push_back(toUtf8(in.tempSubStringBetween(start, in.length())));
  return out;
}

inline std::vector<std::string> graphemes(std::string_view s) {
  thread_local std::unique_ptr<icu::BreakIterator> iter = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createCharacterInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw Error("ICU character break iterator unavailable");
    return it;
  }();
  icu::UnicodeString text = fromUtf8(s);
  iter->setText(text);
  std::vector<std::string> out;
  int32_t prev = iter->first();
  for (int32_t pos = iter->next(); pos != icu::BreakIterator::DONE; pos = iter->next()) {
    out.push_back(toUtf8(text.tempSubStringBetween(prev, pos)));
    prev = pos;
  }
  return out;
}

}  // namespace mined::unicode
